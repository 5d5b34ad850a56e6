"""Fixed quadrature rules used by the inversion and band integrals."""
import numpy as np

# 7-point Gauss / 15-point Kronrod pair on [-1, 1] (QUADPACK qk15 constants)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK15_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK15_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
GK15_GAUSS = np.zeros(15)
# Gauss nodes sit at odd positions of the Kronrod abscissae
GK15_GAUSS[1:7:2] = _WG[:3]
GK15_GAUSS[7] = _WG[3]
GK15_GAUSS[9:15:2] = _WG[2::-1]


def gk15_panels(edges):
    """Nodes (n_panels, 15) and per-panel half widths for a panel partition."""
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    return mid[:, None] + half[:, None] * GK15_NODES[None, :], half


def gauss_legendre_theta(n):
    """Gauss-Legendre nodes/weights on ``[0, pi]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * np.pi * (x + 1.0), 0.5 * np.pi * w
