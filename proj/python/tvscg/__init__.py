"""Matrix-free tomographic reconstruction with TV-superiorized CG solvers."""

from ._core import (
    add_noise,
    back_project,
    constants,
    fbp,
    phantom,
    project,
    reconstruct,
    spectral_norm,
    tv_norm,
    tv_prox,
)

__all__ = [
    "add_noise",
    "back_project",
    "constants",
    "fbp",
    "phantom",
    "project",
    "reconstruct",
    "spectral_norm",
    "tv_norm",
    "tv_prox",
]
