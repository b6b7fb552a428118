import numpy as np


class Record(object):
    """Immutable value with a declared list of fields.

    Subclasses list their attribute names in FIELDS. Fields not passed to the
    constructor are None. Names starting with '_' are kept out of repr() and
    as_dict().
    """
    FIELDS = []

    def __init__(self, **values):
        for key in self.FIELDS:
            object.__setattr__(self, key, values.pop(key, None))
        if values:
            raise TypeError('unknown fields for %s: %s' %
                            (self.__class__.__name__,
                             ', '.join(sorted(values))))

    def __setattr__(self, key, value):
        raise AttributeError('%s is immutable' % self.__class__.__name__)

    def replace(self, **values):
        fields = dict((key, getattr(self, key)) for key in self.FIELDS)
        fields.update(values)
        return self.__class__(**fields)

    def as_dict(self):
        """Returns public fields as plain python values (JSON-ready)."""
        out = {}
        for key in self.FIELDS:
            if key.startswith('_'):
                continue
            out[key] = _plain(getattr(self, key))
        return out

    def __repr__(self):
        fields = []
        for key in self.FIELDS:
            if key.startswith('_'):
                continue
            fields.append('%s=%r' % (key, getattr(self, key)))
        return '<%s(%s)>' % (self.__class__.__name__, ', '.join(fields))


def _plain(value):
    if isinstance(value, Record):
        return value.as_dict()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return dict((k, _plain(v)) for k, v in value.items())
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.complexfloating, complex)):
        return [float(value.real), float(value.imag)]
    return value
