"""Small smooth problems with known solutions, used for checks and examples."""
from __future__ import annotations

import numpy as np

from ..moments import MomentProblem, ParamBox


def linear_problem(A, b, box: ParamBox | None = None, n: int = 1) -> MomentProblem:
    """g(theta) = A theta + b; smoothing leaves it unchanged."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    d = A.shape[1]
    return MomentProblem(
        eval=lambda th: A @ th + b,
        box=box or ParamBox.cube(-10.0, 10.0, d),
        p=A.shape[0],
        n=n,
        closed_form_smoothed=lambda th, eps: (A @ th + b, A.copy()),
        name="linear",
    )


def two_basin_problem(penalty: float = 0.5, box: ParamBox | None = None) -> MomentProblem:
    """g(theta) = (theta^2 - 1, penalty (theta - 1)) on [-3, 3].

    The global minimum is theta = 1 (g = 0); a spurious local minimum sits
    near theta = -1.
    """
    def g(th):
        return np.array([th[0] ** 2 - 1.0, penalty * (th[0] - 1.0)])

    def smoothed(th, eps):
        gs = np.array([th[0] ** 2 + eps ** 2 - 1.0, penalty * (th[0] - 1.0)])
        return gs, np.array([[2.0 * th[0]], [penalty]])

    return MomentProblem(eval=g, box=box or ParamBox([-3.0], [3.0]), p=2,
                         closed_form_smoothed=smoothed, theta_dagger=np.array([1.0]),
                         name="two_basin")


def quadratic_problem(A, root, curvature: float = 0.05, box: ParamBox | None = None) -> MomentProblem:
    """g(theta) = A (theta - root) + curvature (theta - root)^2 (elementwise square, p = d).

    Exact root at ``root``. Gaussian smoothing shifts the moments by
    curvature * eps^2 but leaves the Jacobian A + 2 curvature diag(theta - root).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    root = np.asarray(root, dtype=float)
    d = root.size

    def g(th):
        r = th - root
        return A @ r + curvature * r * r

    def smoothed(th, eps):
        r = th - root
        return A @ r + curvature * (r * r + eps * eps), A + 2.0 * curvature * np.diag(r)

    return MomentProblem(eval=g, box=box or ParamBox.cube(-5.0, 5.0, d), p=d,
                         closed_form_smoothed=smoothed, theta_dagger=root, name="quadratic")
