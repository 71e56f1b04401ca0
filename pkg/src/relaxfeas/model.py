"""Problem representations and transforms.

A ``LinearSystem`` holds "Ax = b, Cx <= d".  The two transforms that drive
all solvers are homogenization (one extra scale variable t with t >= 1,
turning the polyhedron into a cone slice) and strengthening (shifting every
inequality right-hand side down by eps).  Induced hyperplanes carry a
``Certificate``: multipliers over the system rows that reconstruct them, so
validity is machine-checkable.

Also here: the seeded instance generators used by the benchmark harness and
a line-oriented text / JSON instance file format.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotHomogenized, ParseError, ZeroNormal
from .linalg import TAU_ZERO, as_matrix, as_vector, tau_cert


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Dense description of Ax = b, Cx <= d.

    ``homog_row`` marks the index (into C) of the scale lower-bound row
    "-t <= -1" after homogenization; None for plain systems.  Arrays are
    read-only after construction.
    """

    A: np.ndarray
    b: np.ndarray
    C: np.ndarray
    d: np.ndarray
    names: tuple = None
    homog_row: int = None

    def __post_init__(self):
        A = as_matrix(self.A)
        C = as_matrix(self.C)
        b = as_vector(self.b)
        d = as_vector(self.d)
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has {b.shape[0]}")
        if C.shape[0] != d.shape[0]:
            raise DimensionMismatch(f"C has {C.shape[0]} rows but d has {d.shape[0]}")
        if A.shape[0] > 0 and C.shape[0] > 0 and A.shape[1] != C.shape[1]:
            raise DimensionMismatch(
                f"A has {A.shape[1]} columns but C has {C.shape[1]}")
        if A.size and not np.all(np.isfinite(A)) or C.size and not np.all(np.isfinite(C)):
            raise ValueError("non-finite matrix entry")
        for M, label in ((A, "A"), (C, "C")):
            if M.shape[0] and np.min(np.max(np.abs(M), axis=1)) <= TAU_ZERO:
                raise ZeroNormal(f"{label} contains a zero row")
        if self.homog_row is not None and not (0 <= self.homog_row < C.shape[0]):
            raise DimensionMismatch("homog_row outside inequality block")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "C", _frozen(C))
        object.__setattr__(self, "d", _frozen(d))

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def l(self):
        return self.C.shape[0]

    @property
    def n(self):
        if self.A.shape[0] > 0 or self.A.shape[1] > 0:
            return self.A.shape[1]
        return self.C.shape[1]

    @property
    def c_max(self):
        """Largest Euclidean norm over inequality rows (0.0 when l = 0)."""
        if self.l == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.C, axis=1)))

    def eq_residuals(self, x):
        return self.A @ np.asarray(x, dtype=float) - self.b

    def ineq_slack(self, x):
        """d - Cx; nonnegative entries mean satisfied rows."""
        return self.d - self.C @ np.asarray(x, dtype=float)

    def satisfies(self, x, eq_tol=1e-8, ineq_tol=1e-8):
        x = np.asarray(x, dtype=float)
        if self.m and np.max(np.abs(self.eq_residuals(x))) > eq_tol:
            return False
        if self.l and np.min(self.ineq_slack(x)) < -ineq_tol:
            return False
        return True

    def move_ineq_to_eq(self, k):
        """Return a system with inequality row k turned into an equality."""
        if not (0 <= k < self.l):
            raise IndexError(f"inequality row {k} out of range")
        if self.homog_row == k:
            raise ValueError("cannot move the homogenization row")
        A = np.vstack([self.A, self.C[k:k + 1]]) if self.m else self.C[k:k + 1].copy()
        b = np.concatenate([self.b, self.d[k:k + 1]])
        keep = [i for i in range(self.l) if i != k]
        hr = self.homog_row
        if hr is not None and hr > k:
            hr -= 1
        return LinearSystem(A=A, b=b, C=self.C[keep], d=self.d[keep], homog_row=hr)

    def equals(self, other):
        return (np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b)
                and np.array_equal(self.C, other.C) and np.array_equal(self.d, other.d))


@dataclass(frozen=True)
class Certificate:
    """Row multipliers proving validity of an induced inequality.

    Equality multipliers are free-signed; inequality multipliers and the
    multiplier on the homogenization row (``extra_mult``) must be >= 0.
    """

    eq_mults: np.ndarray
    ineq_mults: np.ndarray
    extra_mult: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "eq_mults", _frozen(as_vector(self.eq_mults)))
        object.__setattr__(self, "ineq_mults", _frozen(as_vector(self.ineq_mults)))

    def full_ineq_mults(self, sys):
        """Multipliers over all l rows of sys.C, homogenization row included."""
        if sys.homog_row is None:
            if self.ineq_mults.shape[0] != sys.l:
                raise DimensionMismatch("certificate does not match system rows")
            return self.ineq_mults.copy()
        if self.ineq_mults.shape[0] != sys.l - 1:
            raise DimensionMismatch("certificate does not match system rows")
        full = np.empty(sys.l)
        rows = [i for i in range(sys.l) if i != sys.homog_row]
        full[rows] = self.ineq_mults
        full[sys.homog_row] = self.extra_mult
        return full

    def reconstruct(self, sys):
        """Recompute (h, delta) from the multipliers against sys."""
        full = self.full_ineq_mults(sys)
        h = np.zeros(sys.n)
        delta = 0.0
        if sys.m:
            h += self.eq_mults @ sys.A
            delta += float(self.eq_mults @ sys.b)
        if sys.l:
            h += full @ sys.C
            delta += float(full @ sys.d)
        return h, delta


def combine_certificates(c1, c2, alpha):
    return Certificate(
        eq_mults=alpha * c1.eq_mults + (1.0 - alpha) * c2.eq_mults,
        ineq_mults=alpha * c1.ineq_mults + (1.0 - alpha) * c2.ineq_mults,
        extra_mult=alpha * c1.extra_mult + (1.0 - alpha) * c2.extra_mult,
    )


@dataclass(frozen=True)
class Hyperplane:
    """Valid inequality h.x <= delta together with its certificate."""

    h: np.ndarray
    delta: float
    cert: Certificate = None

    def __post_init__(self):
        h = as_vector(self.h)
        if np.linalg.norm(h) <= TAU_ZERO:
            raise ZeroNormal("hyperplane normal is (numerically) zero")
        object.__setattr__(self, "h", _frozen(h))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def norm(self):
        return float(np.linalg.norm(self.h))

    def distance_from(self, z):
        """(h.z - delta)/|h|; positive when z is on the violated side."""
        return (float(self.h @ as_vector(z)) - self.delta) / self.norm


@dataclass(frozen=True)
class Ball:
    """Open ball B(z, r)."""

    z: np.ndarray
    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "z", _frozen(as_vector(self.z)))


@dataclass(frozen=True)
class CertificateCheck:
    valid: bool
    residuals: dict = field(default_factory=dict)

    def __bool__(self):
        return self.valid


def validate_certificate(sys, hp):
    """Check that hp.cert reconstructs hp with nonnegative inequality weights."""
    if hp.cert is None:
        return CertificateCheck(False, {"reason": "no certificate"})
    tau = tau_cert(hp.h)
    h_rec, d_rec = hp.cert.reconstruct(sys)
    res_h = float(np.max(np.abs(h_rec - hp.h))) if hp.h.size else 0.0
    res_d = abs(d_rec - hp.delta)
    min_mult = float(np.min(hp.cert.ineq_mults)) if hp.cert.ineq_mults.size else 0.0
    min_mult = min(min_mult, hp.cert.extra_mult)
    ok = res_h <= tau and res_d <= tau and min_mult >= -tau
    return CertificateCheck(ok, {"h": res_h, "delta": res_d, "min_mult": min_mult})


# ---------------------------------------------------------------------------
# transforms

def homogenize(sys):
    """Lift to n+1 variables: Ax - bt = 0, Cx - dt <= 0, -t <= -1.

    Feasibility is preserved: x solves the input iff (x, 1) solves the
    output, and any output solution (x, t) yields x/t for the input.
    The appended scale row is remembered via ``homog_row``.
    """
    n = sys.n
    A = np.hstack([sys.A, -sys.b[:, None]]) if sys.m else np.zeros((0, n + 1))
    b = np.zeros(sys.m)
    t_row = np.zeros(n + 1)
    t_row[n] = -1.0
    if sys.l:
        C = np.vstack([np.hstack([sys.C, -sys.d[:, None]]), t_row])
        d = np.concatenate([np.zeros(sys.l), [-1.0]])
    else:
        C = t_row[None, :]
        d = np.array([-1.0])
    return LinearSystem(A=A, b=b, C=C, d=d, homog_row=sys.l)


def strengthen(sys, eps):
    """Shift every inequality right-hand side down by eps.

    Only valid on homogenized systems (the scale row -t <= -1 becomes
    -t <= -1-eps); raises NotHomogenized otherwise.
    """
    if sys.homog_row is None:
        raise NotHomogenized("strengthen requires a homogenized system")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return LinearSystem(A=sys.A, b=sys.b, C=sys.C, d=sys.d - eps,
                        homog_row=sys.homog_row)


def standardize_bounded(A, b, lam):
    """Rewrite Ax = b, 0 <= x <= lam 1 in standard form with slacks.

    Output has 2n variables (x, y), equalities [[A, 0], [I, I]] (x, y) =
    (b, lam 1) and nonnegativity rows -x <= 0, -y <= 0.  The maximum
    subdeterminant of the new equality matrix equals that of A.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    A = as_matrix(A)
    b = as_vector(b)
    m, n = A.shape
    eye = np.eye(n)
    top = np.hstack([A, np.zeros((m, n))])
    bottom = np.hstack([eye, eye])
    A2 = np.vstack([top, bottom])
    b2 = np.concatenate([b, np.full(n, float(lam))])
    C2 = -np.eye(2 * n)
    d2 = np.zeros(2 * n)
    return LinearSystem(A=A2, b=b2, C=C2, d=d2)


def reduce_equalities(A, b, tol=None):
    """Keep a maximal independent subset of equality rows.

    Returns (A2, b2, consistent); consistent is False when the full system
    Ax = b has no solution (some dropped row conflicts with the kept ones).
    """
    A = as_matrix(A)
    b = as_vector(b)
    m = A.shape[0]
    if m == 0:
        return A, b, True
    if tol is None:
        tol = 1e-8 * (1.0 + float(np.max(np.abs(b))))
    keep = []
    rank = 0
    for i in range(m):
        r = np.linalg.matrix_rank(A[keep + [i]])
        if r > rank:
            keep.append(i)
            rank = r
    x, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
    consistent = bool(np.max(np.abs(A @ x - b)) <= tol)
    return A[keep].copy(), b[keep].copy(), consistent


# ---------------------------------------------------------------------------
# instances and generators

@dataclass(frozen=True)
class Instance:
    """A named system plus the provenance needed to regenerate it."""

    system: LinearSystem
    family: str
    seed: int = 0
    name: str = ""
    meta: dict = field(default_factory=dict)


def gen_random01(n, seed):
    """Random equality system over the 0-1 box.

    A is a 0-1 matrix with a uniformly random number of rows in {1..n-1}
    (zero rows resampled), b has integer entries uniform in {1..n}, and the
    box is stored explicitly as inequality rows x <= 1, -x <= 0.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, n))
    A = rng.integers(0, 2, size=(m, n)).astype(float)
    for i in range(m):
        while not A[i].any():
            A[i] = rng.integers(0, 2, size=n).astype(float)
    b = rng.integers(1, n + 1, size=m).astype(float)
    C = np.vstack([np.eye(n), -np.eye(n)])
    d = np.concatenate([np.ones(n), np.zeros(n)])
    sys = LinearSystem(A=A, b=b, C=C, d=d)
    return Instance(system=sys, family="random01", seed=int(seed),
                    name=f"random01-n{n}-s{seed}", meta={"n": int(n)})


def gen_wedge(alpha):
    """Anchored planar wedge whose half-angle has tangent 2**-alpha.

    Two walls through the origin around the diagonal direction plus the
    anchor -x1 <= -1; all entries integer.  The narrower the wedge, the
    worse projection methods zigzag, so iteration counts grow with alpha.
    """
    if alpha < 1:
        raise ValueError("need alpha >= 1")
    w = 2 ** int(alpha)
    C = np.array([
        [-(w + 1.0), w - 1.0],
        [w - 1.0, -(w + 1.0)],
        [-1.0, 0.0],
    ])
    d = np.array([0.0, 0.0, -1.0])
    sys = LinearSystem(A=np.zeros((0, 2)), b=np.zeros(0), C=C, d=d)
    return Instance(system=sys, family="wedge", seed=0,
                    name=f"wedge-a{alpha}", meta={"alpha": int(alpha)})


# ---------------------------------------------------------------------------
# instance files

def _fmt(v):
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def write_instance(inst, path):
    """Serialize to the text format, or the JSON mirror for .json paths."""
    path = str(path)
    sys = inst.system
    if path.endswith(".json"):
        payload = {
            "name": inst.name,
            "A": [[_num(v) for v in row] for row in sys.A],
            "b": [_num(v) for v in sys.b],
            "C": [[_num(v) for v in row] for row in sys.C],
            "d": [_num(v) for v in sys.d],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = []
        if inst.name:
            lines.append(f"# {inst.name}")
        lines.append(f"{sys.n} {sys.m} {sys.l}")
        for i in range(sys.m):
            lines.append(" ".join(_fmt(v) for v in sys.A[i]) + " " + _fmt(sys.b[i]))
        for k in range(sys.l):
            lines.append(" ".join(_fmt(v) for v in sys.C[k]) + " " + _fmt(sys.d[k]))
        text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _num(v):
    f = float(v)
    return int(f) if f == int(f) and abs(f) < 1e15 else f


def read_instance(path):
    """Parse a text or JSON instance file; lossless against write_instance."""
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        raw = fh.read()
    stripped = raw.lstrip()
    if stripped.startswith("{"):
        return _read_json(raw, path)
    return _read_text(raw, path)


def _read_json(raw, path):
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno)
    for key in ("A", "b", "C", "d"):
        if key not in payload:
            raise ParseError(f"JSON instance missing field {key!r}")
    name = payload.get("name", "")
    width = 0
    if payload["A"]:
        width = len(payload["A"][0])
    elif payload["C"]:
        width = len(payload["C"][0])
    A = np.array(payload["A"], dtype=float) if payload["A"] else np.zeros((0, width))
    C = np.array(payload["C"], dtype=float) if payload["C"] else np.zeros((0, width))
    sys = LinearSystem(A=A, b=np.array(payload["b"], dtype=float),
                       C=C, d=np.array(payload["d"], dtype=float))
    return Instance(system=sys, family="file", seed=0, name=name, meta={"path": path})


def _read_text(raw, path):
    rows = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        rows.append((lineno, body))
    if not rows:
        raise ParseError("empty instance file")
    header_line, header = rows[0]
    parts = header.split()
    if len(parts) != 3:
        raise ParseError("header must be 'n m l'", line=header_line)
    try:
        n, m, l = (int(p) for p in parts)
    except ValueError:
        raise ParseError("header must contain three integers", line=header_line)
    if n < 1 or m < 0 or l < 0:
        raise DimensionMismatch(f"bad dimensions n={n} m={m} l={l}")
    if len(rows) - 1 != m + l:
        raise DimensionMismatch(
            f"expected {m + l} data rows, found {len(rows) - 1}")
    data = np.zeros((m + l, n + 1))
    for r, (lineno, body) in enumerate(rows[1:]):
        tokens = body.split()
        if len(tokens) != n + 1:
            raise ParseError(f"expected {n + 1} numbers, found {len(tokens)}",
                             line=lineno)
        for c, tok in enumerate(tokens):
            try:
                data[r, c] = float(tok)
            except ValueError:
                raise ParseError(f"bad number {tok!r}", line=lineno, column=c + 1)
    name = ""
    first = raw.splitlines()[0] if raw.splitlines() else ""
    if first.startswith("#"):
        name = first[1:].strip()
    sys = LinearSystem(A=data[:m, :n], b=data[:m, n], C=data[m:, :n], d=data[m:, n])
    return Instance(system=sys, family="file", seed=0, name=name, meta={"path": path})
