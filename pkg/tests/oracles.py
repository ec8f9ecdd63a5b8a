"""Independent reference computations used by the tests.

Nothing here imports accelcal; each routine recomputes a quantity by a
different route (pivoted elimination, cofactors, 50-digit arithmetic).
"""
import mpmath as mp

mp.mp.dps = 50


def gauss_solve(m, rhs):
    """Partial-pivot Gaussian elimination on plain Python floats."""
    n = len(rhs)
    a = [list(map(float, row)) + [float(r)] for row, r in zip(m, rhs)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        a[col], a[piv] = a[piv], a[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            for c in range(col, n + 1):
                a[r][c] -= f * a[col][c]
    x = [0.0] * n
    for r in reversed(range(n)):
        x[r] = (a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))) / a[r][r]
    return x


def mp_gram(phi, psi, theta):
    cp, cs, ct = mp.cos(mp.mpf(phi)), mp.cos(mp.mpf(psi)), mp.cos(mp.mpf(theta))
    return [[mp.mpf(1), cp, cs], [cp, mp.mpf(1), ct], [cs, ct, mp.mpf(1)]]


def cofactor_inverse(m):
    """3x3 inverse via the adjugate, in 50-digit arithmetic."""
    m = [[mp.mpf(x) for x in row] for row in m]

    def minor(i, j):
        rows = [r for k, r in enumerate(m) if k != i]
        sub = [[x for k, x in enumerate(r) if k != j] for r in rows]
        return sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]

    det = sum((-1) ** j * m[0][j] * minor(0, j) for j in range(3))
    return [[(-1) ** (i + j) * minor(j, i) / det for j in range(3)] for i in range(3)]


def mp_orthonormalization(phi, psi, theta):
    """Entries of the upper-triangular axis matrix, evaluated term by term."""
    phi, psi, theta = mp.mpf(phi), mp.mpf(psi), mp.mpf(theta)
    cp, cs, ct, sp = mp.cos(phi), mp.cos(psi), mp.cos(theta), mp.sin(phi)
    root = mp.sqrt(1 - cp ** 2 - cs ** 2 - ct ** 2 + 2 * cp * cs * ct)
    return [[1, cp, cs], [0, sp, (ct - cp * cs) / sp], [0, 0, root / sp]]


def to_float(m):
    return [[float(x) for x in row] for row in m]
