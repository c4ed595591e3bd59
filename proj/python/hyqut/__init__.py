"""Python bindings for the hyqut C++ core."""

from ._hyqut import (
    ConfigError,
    IoError,
    Model,
    NumericalError,
    UsageError,
    ablation,
    census,
    count_params,
    encoded_expectations,
    gradcheck,
    lr_at_step,
    measure,
    simulate,
)

__all__ = [
    "ConfigError",
    "IoError",
    "Model",
    "NumericalError",
    "UsageError",
    "ablation",
    "census",
    "count_params",
    "encoded_expectations",
    "gradcheck",
    "lr_at_step",
    "measure",
    "simulate",
]
