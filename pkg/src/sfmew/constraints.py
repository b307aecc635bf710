"""Assembly of the constraint polynomials P0..P3 from point invariants.

For a non-flat structure, local solvability forces the curvature scalar F of
the candidate connection to be a simultaneous root of three polynomials whose
coefficients are the invariants of :mod:`sfmew.invariants`; ``P0`` is the
denominator polynomial of the reconstruction formula.  P2 is assembled in a
grouped form that clears the rational factor exactly::

    P2(t) = (sigma - 15 rho t^2) (A + B t + C t^2)^2 + P0(t) Q(t)

with A = rho ell + tau phi, B = 5/2 rho^2, C = tau + 3 mu rho, and Q the
remaining degree-8 part.  Coefficients enter raw; normalization for root and
resultant work happens in :mod:`sfmew.polyalg`.
"""

from numpy.polynomial import polynomial as npoly

from .polyalg import Poly

__all__ = ["assemble_P0", "assemble_P1", "assemble_P2", "assemble_P3", "DivisionByRho"]


class DivisionByRho(Exception):
    """rho is too small to divide by (flat point reached the assembler)."""


def assemble_P0(inv):
    """P0(t) = sigma - 3 rho t^2."""
    return Poly([inv.sigma, 0.0, -3.0 * inv.rho])


def assemble_P1(inv):
    """First constraint polynomial (degree 8; meaningful for rho > 0)."""
    rho, mu, phi, sigma, tau, ell = inv.rho, inv.mu, inv.phi, inv.sigma, inv.tau, inv.ell
    t3m = tau + 3.0 * mu * rho
    rlpt = rho * ell + phi * tau
    c8 = 31.5 * rho**2
    c6 = -12.0 * rho * sigma
    c4 = (
        12.0 * rho * sigma * phi
        - 63.0 * rho**2 * phi**2
        + 3.0 * rho * inv.dsigma_U
        + 0.5 * t3m**2
        + 0.5 * (3.0 * rho * phi - sigma) ** 2
        + 1.5 * rho * inv.hess_rho_UU
        - 9.0 * rho**2 * inv.P_UU
    )
    c3 = 7.5 * rho**3 * mu + 2.5 * tau * rho**2 + 7.5 * rho**2 * inv.dY_UU
    c2 = (
        (3.0 * rho * phi - sigma) * inv.dsigma_U
        + 21.0 * rho * phi**2 * sigma
        - 3.0 * phi * sigma**2
        + rlpt * t3m
        + 25.0 / 8.0 * rho**4
        + 3.0 * rho * inv.dL_UU
        + 6.0 * rho * sigma * inv.P_UU
        - 0.5 * sigma * inv.hess_rho_UU
    )
    c1 = 2.5 * rho**2 * rlpt - 2.5 * inv.dY_UU * sigma * rho
    c0 = (
        -sigma * phi * inv.dsigma_U
        + 0.5 * rlpt**2
        - 0.5 * phi**2 * sigma**2
        - sigma * (inv.dL_UU + sigma * inv.P_UU)
    )
    return Poly([c0, c1, c2, c3, c4, 0.0, c6, 0.0, c8])


def _q_part(inv):
    """Degree-8 part of the second constraint outside the rational term."""
    rho, mu, phi, sigma, tau, ell = inv.rho, inv.mu, inv.phi, inv.sigma, inv.tau, inv.ell
    t3m = tau + 3.0 * mu * rho
    rlpt = rho * ell + phi * tau
    q8 = -4.5 * rho**2
    q6 = -(9.0 * inv.dU_YY * rho + 3.0 * rho * (3.0 * phi * rho - sigma))
    q4 = (
        3.0 * inv.dU_YY * sigma
        - 1.5 * rho * inv.hess_rho_YY
        + 1.5 * t3m**2
        + 9.0 * rho**2 * inv.P_YY
        + 3.0 * phi * sigma * rho
        - 0.5 * (3.0 * phi * rho - sigma) ** 2
    )
    q3 = -25.0 * rho**2 * t3m
    q2 = (
        0.5 * inv.hess_rho_YY * sigma
        - 185.0 / 8.0 * rho**4
        - 3.0 * inv.dL_YY * rho
        - 6.0 * rho * sigma * inv.P_YY
        + phi * sigma * (3.0 * phi * rho - sigma)
        + t3m * rlpt
        - t3m * inv.dsigma_Y
    )
    q1 = 5.5 * rho * sigma * t3m - 13.5 * rho**2 * rlpt - 2.5 * rho**2 * inv.dsigma_Y
    q0 = (
        inv.dL_YY * sigma
        - 2.5 * sigma * rho**3
        + inv.P_YY * sigma**2
        - 0.5 * rlpt**2
        - 0.5 * phi**2 * sigma**2
        - rlpt * inv.dsigma_Y
    )
    return [q0, q1, q2, q3, q4, 0.0, q6, 0.0, q8]


def assemble_P2(inv):
    """Second constraint polynomial with denominators cleared (degree 10)."""
    rho, mu, phi, sigma, tau, ell = inv.rho, inv.mu, inv.phi, inv.sigma, inv.tau, inv.ell
    abc = [rho * ell + tau * phi, 2.5 * rho**2, tau + 3.0 * mu * rho]
    head = npoly.polymul([sigma, 0.0, -15.0 * rho], npoly.polymul(abc, abc))
    p0 = assemble_P0(inv)
    tail = npoly.polymul(p0.coeffs, _q_part(inv)) if not p0.is_zero else [0.0]
    return Poly(npoly.polyadd(head, tail))


def assemble_P3(inv):
    """Third constraint polynomial (degree 6; two coefficients divide by rho)."""
    if not inv.rho > 1e-300:
        raise DivisionByRho(f"rho = {inv.rho!r} at {inv.point}")
    rho, mu, phi, sigma, tau, ell = inv.rho, inv.mu, inv.phi, inv.sigma, inv.tau, inv.ell
    rlpt = rho * ell + tau * phi
    c6 = -6.0 * tau
    c5 = 18.0 * rho**2
    c4 = 3.0 * inv.dsigma_Y + 24.0 * rlpt - 6.0 * sigma * mu
    c3 = 13.0 * sigma * rho
    c2 = (
        (3.0 * phi - sigma / rho) * inv.dsigma_Y
        + 30.0 * mu * phi * sigma
        + 30.0 * phi * rho * ell
        + 30.0 * phi**2 * tau
        - (3.0 * mu + tau / rho) * inv.dsigma_U
        - 10.0 * sigma * ell
        + 3.0 * rho * inv.curl_L
    )
    c1 = 25.0 * phi * sigma * rho - 2.5 * rho * inv.dsigma_U - 8.0 * sigma**2
    c0 = (
        -(phi * sigma / rho) * inv.dsigma_Y
        - inv.dsigma_U * (ell + phi * tau / rho)
        - inv.curl_L * sigma
    )
    return Poly([c0, c1, c2, c3, c4, c5, c6])
