"""Generic textbook Kalman filter, matrix form.

Deliberately written against the standard predict/update equations with no
knowledge of any package internals; estimator tests compare the package's
structured filters against this on identical matrices.
"""

import numpy as np


def matrix_kf_step(x, P, F, Q, H, R, y, control=None):
    """One predict + update cycle.

    x: (n,) state, P: (n,n) covariance, F: (n,n) transition, Q: (n,n) process
    noise covariance, H: (m,n) observation matrix, R: (m,m) or scalar
    observation noise, y: (m,) or scalar observation, control: optional (n,)
    additive known input to the prediction.

    Returns (x_posterior, P_posterior).
    """
    x = np.asarray(x, dtype=float)
    P = np.asarray(P, dtype=float)
    F = np.asarray(F, dtype=float)
    Q = np.asarray(Q, dtype=float)
    H = np.atleast_2d(np.asarray(H, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))

    x_prior = F @ x
    if control is not None:
        x_prior = x_prior + np.asarray(control, dtype=float)
    P_prior = F @ P @ F.T + Q

    S = H @ P_prior @ H.T + R
    if np.all(np.isfinite(S)):
        K = P_prior @ H.T @ np.linalg.inv(S)
    else:
        K = np.zeros((x.size, H.shape[0]))
    x_post = x_prior + K @ (y - H @ x_prior)
    P_post = (np.eye(x.size) - K @ H) @ P_prior
    return x_post, P_post
