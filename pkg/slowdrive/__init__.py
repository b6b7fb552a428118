from slowdrive import configuration

config = configuration.Config()
