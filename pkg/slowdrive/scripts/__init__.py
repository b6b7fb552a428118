from slowdrive.theory import InvalidParameterError


class ConfigError(InvalidParameterError):
    pass
