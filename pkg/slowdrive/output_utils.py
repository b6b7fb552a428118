"""Deterministic table and document emission for the command line tools."""
import io
import json
import numbers

import numpy as np
import pandas

from slowdrive.theory import NumericalError
from slowdrive.theory.records import _plain

FLOAT_FORMAT = '%.17g'


def config_header(resolved):
    """The resolved run configuration as '# '-prefixed JSON lines."""
    text = json.dumps(_plain(resolved), indent=2, sort_keys=True)
    return ''.join('# %s\n' % line for line in text.splitlines())


def check_finite(rows):
    for index, row in enumerate(rows):
        for key, value in row.items():
            if isinstance(value, numbers.Number) and not isinstance(
                    value, bool) and not np.isfinite(value):
                raise NumericalError('non-finite %s=%r in row %d' %
                                     (key, value, index))


class TableWriter(object):
    """Collects rows and renders them as CSV behind a config header."""

    def __init__(self, columns, resolved_config):
        self._columns = list(columns)
        self._config = resolved_config
        self._rows = []

    def add(self, **row):
        unknown = set(row) - set(self._columns)
        if unknown:
            raise KeyError('unknown columns: %s' % ', '.join(sorted(unknown)))
        self._rows.append(row)

    def extend(self, rows):
        for row in rows:
            self.add(**row)

    @property
    def rows(self):
        return list(self._rows)

    def frame(self):
        return pandas.DataFrame(self._rows, columns=self._columns)

    def render(self):
        check_finite(self._rows)
        buf = io.StringIO()
        buf.write(config_header(self._config))
        self.frame().to_csv(buf, index=False, float_format=FLOAT_FORMAT,
                            na_rep='', lineterminator='\n')
        return buf.getvalue()


def render_json(payload, resolved_config):
    document = {'config': resolved_config, 'result': payload}
    try:
        return json.dumps(_plain(document), indent=2, sort_keys=True,
                          allow_nan=False) + '\n'
    except ValueError as e:
        raise NumericalError('non-finite value in result: %s' % e)
