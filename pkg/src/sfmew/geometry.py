"""Moebius structures on planar domains and their Levi-Civita calculus.

A structure is a conformally flat representative metric ``g_ab = e^{2u} d_ab``
together with a symmetric Rho tensor ``P_ab`` whose metric trace must equal
the Gauss curvature of ``g``.  All differential geometry happens on jets
evaluated at a base point (:class:`Frame`), so covariant derivatives of any
depth reduce to exact coefficient manipulation.

Conventions: indices are raised/lowered with ``g``; the volume form has
``eps_12 = orientation * e^{2u}`` and satisfies ``eps^{ab} eps_cb = delta_c^a``.
"""

from dataclasses import dataclass

from . import expr as ex
from . import jets
from .expr import Expr, eval_jet, parse
from .jets import Jet, jet_space

__all__ = [
    "MoebiusStructure",
    "TensorAtPoint",
    "Frame",
    "christoffel",
    "gauss_curvature",
    "covariant_derivative",
    "conformal_rescale",
    "validate",
    "ValidationReport",
]


@dataclass(frozen=True)
class MoebiusStructure:
    """Problem instance: log conformal factor and Rho tensor components.

    ``u`` defines the metric ``e^{2u} d_ab`` (always positive); ``p11``,
    ``p12``, ``p22`` are the coordinate components of the symmetric Rho
    tensor (``p21 = p12``).  Immutable after construction.
    """

    u: Expr
    p11: Expr
    p12: Expr
    p22: Expr

    @classmethod
    def from_strings(cls, u, p11, p12, p22):
        return cls(parse(u), parse(p11), parse(p12), parse(p22))

    def p_component(self, a, b):
        if a == b:
            return self.p11 if a == 0 else self.p22
        return self.p12

    def rescaled(self, omega):
        """Structure for the metric ``e^{2 omega} g`` in the same class.

        The new Rho components absorb the gradient terms of the rescaling,
        so the trace condition keeps holding automatically.
        """
        if isinstance(omega, str):
            omega = parse(omega)
        ux, uy = ex.differentiate(self.u, "x"), ex.differentiate(self.u, "y")
        wx, wy = ex.differentiate(omega, "x"), ex.differentiate(omega, "y")
        wxx = ex.differentiate(wx, "x")
        wxy = ex.differentiate(wx, "y")
        wyy = ex.differentiate(wy, "y")
        # Christoffel symbols of the original representative metric.
        gamma = {
            (0, 0, 0): ux,
            (1, 0, 0): ex.neg(uy),
            (0, 0, 1): uy,
            (1, 0, 1): ux,
            (0, 1, 1): ex.neg(ux),
            (1, 1, 1): uy,
        }

        def hess(a, b, ddw):
            # nabla_a nabla_b omega = dd omega - Gamma^c_ab d_c omega
            corr = ex.add(
                ex.mul(gamma[(0, a, b) if a <= b else (0, b, a)], wx),
                ex.mul(gamma[(1, a, b) if a <= b else (1, b, a)], wy),
            )
            return ex.sub(ddw, corr)

        grad_sq = ex.add(ex.mul(wx, wx), ex.mul(wy, wy))
        half_grad_sq = ex.mul(ex.Num(0.5), grad_sq)
        p11 = ex.add(
            ex.sub(self.p11, hess(0, 0, wxx)),
            ex.sub(ex.mul(wx, wx), half_grad_sq),
        )
        p12 = ex.add(ex.sub(self.p12, hess(0, 1, wxy)), ex.mul(wx, wy))
        p22 = ex.add(
            ex.sub(self.p22, hess(1, 1, wyy)),
            ex.sub(ex.mul(wy, wy), half_grad_sq),
        )
        return MoebiusStructure(ex.add(self.u, omega), p11, p12, p22)


@dataclass
class TensorAtPoint:
    """Tensor with jet components at a point.

    ``kinds`` is one character per index: ``"d"`` covariant (down), ``"u"``
    contravariant (up); components are nested lists over index values 0/1
    (a bare jet for a scalar).  ``weight`` is conformal-weight metadata and
    is only exercised by the rescaling tests.
    """

    comp: object
    kinds: str = ""
    weight: int = 0

    def component(self, *indices):
        c = self.comp
        for i in indices:
            c = c[i]
        return c


class Frame:
    """Jet-valued geometric data of a structure at one base point.

    Evaluates the conformal factor and Rho components as jets of the given
    order and derives the metric factors, Christoffel symbols and Gauss
    curvature.  All methods are pure; a frame can be shared between threads.
    """

    def __init__(self, structure, point, order=6, orientation=1):
        if order < 2:
            raise ValueError("frame needs jet order >= 2 for curvature")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.structure = structure
        self.point = (float(point[0]), float(point[1]))
        self.order = order
        self.orientation = orientation
        self.space = jet_space(order)

        self.u = eval_jet(structure.u, self.point, order, self.space)
        p11 = eval_jet(structure.p11, self.point, order, self.space)
        p12 = eval_jet(structure.p12, self.point, order, self.space)
        p22 = eval_jet(structure.p22, self.point, order, self.space)
        self.p = [[p11, p12], [p12, p22]]

        self.du = [self.u.d_dx(), self.u.d_dy()]
        self.e2u = jets.exp(2.0 * self.u)
        self.e2u_inv = jets.exp(-2.0 * self.u)

        # gamma[c][a][b] = Gamma^c_ab for g = e^{2u} delta
        du = self.du
        zero = Jet.constant(self.space, 0.0, self.point)
        zero.order = du[0].order

        def gamma_entry(c, a, b):
            term = zero
            if c == a:
                term = term + du[b]
            if c == b:
                term = term + du[a]
            if a == b:
                term = term - du[c]
            return term

        self.gamma = [
            [[gamma_entry(c, a, b) for b in range(2)] for a in range(2)] for c in range(2)
        ]

        uxx = self.du[0].d_dx()
        uyy = self.du[1].d_dy()
        self.curvature = -(uxx + uyy) * self.e2u_inv

    # -- coordinate and covariant derivatives --------------------------------

    def d(self, j, axis):
        return j.d_dx() if axis == 0 else j.d_dy()

    def grad(self, scalar):
        return [scalar.d_dx(), scalar.d_dy()]

    def cov_deriv(self, comp, kinds):
        """Covariant derivative; prepends one covariant index.

        ``comp`` is nested lists of jets with ``len(kinds)`` indices. Output
        index order: derivative index first, original indices after.
        """
        rank = len(kinds)

        def get(indices):
            c = comp
            for i in indices:
                c = c[i]
            return c

        def build(a, prefix):
            if len(prefix) == rank:
                term = self.d(get(prefix), a)
                for m, kind in enumerate(kinds):
                    for c in range(2):
                        swapped = prefix[:m] + (c,) + prefix[m + 1 :]
                        if kind == "d":
                            term = term - self.gamma[c][a][prefix[m]] * get(swapped)
                        else:
                            term = term + self.gamma[prefix[m]][a][c] * get(swapped)
                return term
            return [build(a, prefix + (i,)) for i in range(2)]

        return [build(a, ()) for a in range(2)]

    def divergence(self, vec_up):
        """nabla_a V^a for a contravariant vector (Gamma trace is 2 du)."""
        return (
            self.d(vec_up[0], 0)
            + self.d(vec_up[1], 1)
            + 2.0 * (self.du[0] * vec_up[0] + self.du[1] * vec_up[1])
        )

    def hessian(self, scalar):
        ds = self.grad(scalar)
        return self.cov_deriv(ds, "d")

    # -- metric helpers -------------------------------------------------------

    def raise_index(self, form):
        return [self.e2u_inv * form[0], self.e2u_inv * form[1]]

    def lower_index(self, vec_up):
        return [self.e2u * vec_up[0], self.e2u * vec_up[1]]

    def dot(self, a_form, b_form):
        return self.e2u_inv * (a_form[0] * b_form[0] + a_form[1] * b_form[1])

    def rot_form(self, form):
        """eps_ab V^b for a covariant V: the 90-degree rotated 1-form."""
        o = float(self.orientation)
        return [o * form[1], -o * form[0]]

    def rot_vector(self, form):
        """eps^{ab} V_b, a contravariant vector."""
        o = float(self.orientation)
        return [o * (self.e2u_inv * form[1]), -o * (self.e2u_inv * form[0])]

    def metric(self):
        zero = Jet.constant(self.space, 0.0, self.point)
        return [[self.e2u, zero], [zero, self.e2u]]


# ---------------------------------------------------------------------------
# public operations


def christoffel(structure, point, order=6):
    """Christoffel symbols Gamma^c_ab as jets (index order [c][a][b])."""
    return Frame(structure, point, order).gamma


def gauss_curvature(structure, point, order=6):
    """Gauss curvature K = -e^{-2u} (u_xx + u_yy) as a jet."""
    return Frame(structure, point, order).curvature


def covariant_derivative(structure, point, tensor, order=6, orientation=1):
    """Covariant derivative of a :class:`TensorAtPoint` (adds one "d" index)."""
    frame = Frame(structure, point, order, orientation)
    if tensor.kinds == "":
        comp = frame.grad(tensor.comp)
    else:
        comp = frame.cov_deriv(tensor.comp, tensor.kinds)
    return TensorAtPoint(comp, "d" + tensor.kinds, tensor.weight)


def conformal_rescale(structure, omega):
    """Alias for :meth:`MoebiusStructure.rescaled`."""
    return structure.rescaled(omega)


@dataclass
class ValidationReport:
    ok: bool
    violations: list  # (x, y, residual, scale)
    tol: float

    def __bool__(self):
        return self.ok


def validate(structure, points, order=4, tol=1e-8):
    """Check the trace condition g^{ab} P_ab = K at sample points.

    The residual is compared against ``tol`` relative to
    ``max(|K|, trace scale, 1)``.
    """
    violations = []
    for (x, y) in points:
        frame = Frame(structure, (x, y), order)
        trace = frame.e2u_inv.value * (frame.p[0][0].value + frame.p[1][1].value)
        k = frame.curvature.value
        scale = max(
            1.0,
            abs(k),
            frame.e2u_inv.value
            * 2.0
            * max(abs(frame.p[0][0].value), abs(frame.p[0][1].value), abs(frame.p[1][1].value)),
        )
        residual = abs(trace - k)
        if residual > tol * scale:
            violations.append((float(x), float(y), residual, scale))
    return ValidationReport(not violations, violations, tol)
