class ConfigError(ValueError):
    """Invalid configuration or mismatched dimensions."""


class SimulationFault(RuntimeError):
    """Numerical failure during simulation (NaN/Inf state, protocol misuse)."""


class EncodingFault(ValueError):
    """Feature value outside the spike-encodable range [0, 1]."""
