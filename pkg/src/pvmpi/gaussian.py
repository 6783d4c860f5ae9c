"""Full-dimensional Gaussian copula: fit, log-likelihood, sampling.

The correlation matrix is estimated as the sample correlation of the
normal scores of the PIT uniforms.  Non-positive-definite estimates are
repaired by diagonal shrinkage with the smallest lambda from
{1e-4, 1e-3, ...} that restores the eigenvalue floor.
"""

import json
import logging
from dataclasses import dataclass

import numpy as np

from . import kernels

logger = logging.getLogger(__name__)

EIG_FLOOR = 1e-10


@dataclass
class GaussianCopulaModel:
    dim: int
    corr: np.ndarray
    loglik: float = 0.0

    @property
    def kappa(self) -> int:
        return self.dim * (self.dim - 1) // 2

    def to_dict(self):
        return {
            "dim": self.dim,
            "corr": [float(x) for x in self.corr.ravel()],
            "loglik": float(self.loglik),
            "kappa": self.kappa,
        }

    @classmethod
    def from_dict(cls, d):
        dim = int(d["dim"])
        corr = np.asarray(d["corr"], dtype=np.float64).reshape(dim, dim)
        return cls(dim=dim, corr=corr, loglik=float(d.get("loglik", 0.0)))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _normal_scores(uniform_matrix):
    u = np.asarray(uniform_matrix, dtype=np.float64)
    flat = np.ascontiguousarray(u.ravel())
    return kernels.norm_ppf(flat).reshape(u.shape)


def fit_gaussian(uniform_matrix) -> GaussianCopulaModel:
    """Fit the copula to a T x D matrix of PIT uniforms."""
    u = np.asarray(uniform_matrix, dtype=np.float64)
    t_rows, dim = u.shape
    if t_rows <= dim:
        raise ValueError(f"need more than D={dim} rows to fit, got {t_rows}")
    z = _normal_scores(u)
    corr = np.atleast_2d(np.corrcoef(z, rowvar=False))

    if np.linalg.eigvalsh(corr).min() <= EIG_FLOOR:
        # smallest ladder lambda whose shrinkage restores the floor
        for lam in (1e-4, 1e-3, 1e-2, 1e-1, 1.0):
            shrunk = (1.0 - lam) * corr + lam * np.eye(dim)
            if np.linalg.eigvalsh(shrunk).min() > EIG_FLOOR:
                logger.warning(
                    "correlation not positive definite; shrunk with lambda=%g", lam)
                corr = shrunk
                break
        else:
            raise RuntimeError("shrinkage failed to restore positive definiteness")

    model = GaussianCopulaModel(dim=dim, corr=corr)
    model.loglik = loglik_gaussian(model, u)
    return model


def logdensity_gaussian(model: GaussianCopulaModel, uniform_matrix) -> np.ndarray:
    """Per-row log copula density (marginals excluded)."""
    u = np.atleast_2d(np.asarray(uniform_matrix, dtype=np.float64))
    if u.shape[1] != model.dim:
        raise ValueError("dimension mismatch")
    sign, logdet = np.linalg.slogdet(model.corr)
    if sign <= 0:
        raise np.linalg.LinAlgError("correlation matrix is singular")
    z = _normal_scores(u)
    prec_minus_eye = np.linalg.inv(model.corr) - np.eye(model.dim)
    quad = np.einsum("ti,ij,tj->t", z, prec_minus_eye, z)
    return -0.5 * logdet - 0.5 * quad


def loglik_gaussian(model: GaussianCopulaModel, uniform_matrix) -> float:
    """Total log-likelihood of the copula density over the rows."""
    return float(np.sum(logdensity_gaussian(model, uniform_matrix)))


def sample_gaussian(model: GaussianCopulaModel, n_samples: int, seed) -> np.ndarray:
    """Draw an S x D matrix of copula uniforms (z = L eps, u = Phi(z))."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(model.corr)
    eps = rng.standard_normal((n_samples, model.dim))
    z = eps @ chol.T
    flat = np.ascontiguousarray(z.ravel())
    return kernels.norm_cdf(flat).reshape(z.shape)
