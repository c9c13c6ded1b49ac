"""Dilation constructions for matrix tuples with verifiable certificates."""
from .bodies import ConvexBody, ScaleVector, sd_classify, theta_simplex_pointed
from .certificates import DilationCertificate
from .linalg import Isometry, MatrixTuple, ToleranceConfig

__all__ = [
    "ConvexBody",
    "DilationCertificate",
    "Isometry",
    "MatrixTuple",
    "ScaleVector",
    "ToleranceConfig",
    "sd_classify",
    "theta_simplex_pointed",
]
