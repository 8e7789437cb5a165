"""Closed-loop assembly of a delayed plant and a structured controller.

The plant may carry neutral terms, delayed states, delayed disturbance and
actuator channels, and feedthrough on both outputs:

    d/dt (x + sum_k H_k x(t-h_k)) = A x + sum Ad_k x(t-a_k) + B0 w
                                    + sum B1_k w(t-b_k) + B2 u + sum B2d_k u(t-c_k)
    z = Cz x + Dz w + Dzu u
    y = Cy x + Du u + Dyw w

The controller is a fixed-order block [[AK, BK], [CK, DK]] whose entries are
either free parameters or fixed constants, optionally reading y with a delay
and acting on the plant through a delayed u channel.

Slack algebraic states put the loop into descriptor delay form with constant
E, B, C and with the controller parameters appearing affinely inside the A
matrices only.  Slack states are introduced exactly where needed:

    gamma_x  when neutral terms exist (carries x + sum H_k x(t-h_k)),
    u        always (the controller output),
    gamma_u  when the actuator channel is delayed,
    y        only when the measurement has feedthrough; a plain y = Cy x
             is folded directly into the controller rows,
    gamma_w  when the disturbance enters delayed or through feedthrough.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .ddae import DdaeSystem, compute_nullspaces, require_causality

__all__ = ["PlantModel", "ControllerStructure", "ClosedLoopTemplate",
           "build_template", "interconnect", "substitute_parameters"]


def _pairs(entries, n_rows, n_cols, name):
    """Normalize a list of (tau, matrix) pairs."""
    out = []
    for tau, M in entries:
        tau = float(tau)
        if not tau > 0.0:
            raise ValueError(f"{name}: delayed terms need tau > 0, got {tau}")
        M = np.atleast_2d(np.array(M, dtype=float))
        if M.shape != (n_rows, n_cols):
            raise ValueError(f"{name}: matrix shape {M.shape} != "
                             f"({n_rows}, {n_cols})")
        out.append((tau, M))
    return out


@dataclass
class PlantModel:
    """Open-loop plant blocks; delayed channels are (tau, matrix) lists."""

    A: NDArray[np.float64]
    B0: NDArray[np.float64]          # w -> state
    B2: NDArray[np.float64]          # u -> state
    Cz: NDArray[np.float64]
    Cy: NDArray[np.float64]
    Ad: list = field(default_factory=list)    # delayed state terms
    H: list = field(default_factory=list)     # neutral terms
    B1: list = field(default_factory=list)    # delayed w
    B2d: list = field(default_factory=list)   # delayed u
    Dz: NDArray[np.float64] | None = None     # w -> z feedthrough
    Dzu: NDArray[np.float64] | None = None    # u -> z feedthrough
    Du: NDArray[np.float64] | None = None     # u -> y feedthrough
    Dyw: NDArray[np.float64] | None = None    # w -> y feedthrough

    def __post_init__(self):
        self.A = np.atleast_2d(np.array(self.A, dtype=float))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError("A must be square")
        self.B0 = np.atleast_2d(np.array(self.B0, dtype=float))
        self.B2 = np.atleast_2d(np.array(self.B2, dtype=float))
        self.Cz = np.atleast_2d(np.array(self.Cz, dtype=float))
        self.Cy = np.atleast_2d(np.array(self.Cy, dtype=float))
        if self.B0.shape[0] != n or self.B2.shape[0] != n:
            raise ValueError("B0/B2 row count must match A")
        if self.Cz.shape[1] != n or self.Cy.shape[1] != n:
            raise ValueError("Cz/Cy column count must match A")
        nw, nu = self.n_w, self.n_u
        self.Ad = _pairs(self.Ad, n, n, "Ad")
        self.H = _pairs(self.H, n, n, "H")
        self.B1 = _pairs(self.B1, n, nw, "B1")
        self.B2d = _pairs(self.B2d, n, nu, "B2d")
        for attr, rows, cols in (("Dz", self.n_z, nw), ("Dzu", self.n_z, nu),
                                 ("Du", self.n_y, nu), ("Dyw", self.n_y, nw)):
            M = getattr(self, attr)
            if M is not None:
                M = np.atleast_2d(np.array(M, dtype=float))
                if M.shape != (rows, cols):
                    raise ValueError(f"{attr} shape {M.shape} != ({rows}, {cols})")
                if not M.any():
                    M = None
            setattr(self, attr, M)

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_w(self) -> int:
        return self.B0.shape[1]

    @property
    def n_u(self) -> int:
        return self.B2.shape[1]

    @property
    def n_z(self) -> int:
        return self.Cz.shape[0]

    @property
    def n_y(self) -> int:
        return self.Cy.shape[0]


@dataclass
class ControllerStructure:
    """Fixed-order controller with an entry-wise free/fixed split.

    The block matrix [[AK, BK], [CK, DK]] has shape
    (order + n_u, order + n_y); mask marks free entries (row-major order
    defines the parameter vector p), fixed_values holds the rest.
    y_delay delays every controller read of y; u_delay delays the plant's
    read of the controller output.
    """

    order: int
    mask: NDArray[np.bool_]
    fixed_values: NDArray[np.float64] | None = None
    y_delay: float = 0.0
    u_delay: float = 0.0

    def __post_init__(self):
        self.mask = np.atleast_2d(np.array(self.mask, dtype=bool))
        if self.order < 0:
            raise ValueError("controller order must be >= 0")
        if self.fixed_values is None:
            self.fixed_values = np.zeros(self.mask.shape)
        self.fixed_values = np.atleast_2d(np.array(self.fixed_values,
                                                   dtype=float))
        if self.fixed_values.shape != self.mask.shape:
            raise ValueError("fixed_values shape must match mask")
        if min(self.mask.shape[0] - self.order,
               self.mask.shape[1] - self.order) < 1:
            raise ValueError("mask shape inconsistent with controller order")
        if self.y_delay < 0.0 or self.u_delay < 0.0:
            raise ValueError("controller delays must be >= 0")

    @property
    def n_u(self) -> int:
        return self.mask.shape[0] - self.order

    @property
    def n_y(self) -> int:
        return self.mask.shape[1] - self.order

    @property
    def n_params(self) -> int:
        return int(self.mask.sum())

    def block(self, p) -> NDArray[np.float64]:
        """The controller matrix with parameters p filled into the mask."""
        p = np.asarray(p, dtype=float).ravel()
        if p.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {p.size}")
        K = self.fixed_values.copy()
        K[self.mask] = p
        return K


def _assemble(plant: PlantModel, ctrl: ControllerStructure,
              p) -> DdaeSystem:
    """One concrete closed loop; see the module docstring for the layout."""
    if ctrl.n_u != plant.n_u or ctrl.n_y != plant.n_y:
        raise ValueError("controller channel dimensions do not match plant")
    K = ctrl.block(p)
    nc = ctrl.order
    AK, BK = K[:nc, :nc], K[:nc, nc:]
    CK, DK = K[nc:, :nc], K[nc:, nc:]

    nx, nw, nu, ny = plant.n_x, plant.n_w, plant.n_u, plant.n_y
    neutral = bool(plant.H)
    need_y = plant.Du is not None or plant.Dyw is not None
    need_gw = bool(plant.B1) or plant.Dz is not None or plant.Dyw is not None
    need_gu = ctrl.u_delay > 0.0

    # state blocks: x, gamma_x?, x_c, u, gamma_u?, y?, gamma_w?
    blocks = [("x", nx)]
    if neutral:
        blocks.append(("gx", nx))
    blocks += [("xc", nc), ("u", nu)]
    if need_gu:
        blocks.append(("gu", nu))
    if need_y:
        blocks.append(("y", ny))
    if need_gw:
        blocks.append(("gw", nw))
    offs, n = {}, 0
    for name, size in blocks:
        offs[name] = slice(n, n + size)
        n += size

    # delay slots are structural: one per delayed plant block and one per
    # delayed controller channel, declared up front so that assemblies at
    # different p always produce identically ordered delay lists (equal
    # delay values stay separate entries on purpose)
    slot_taus: list[float] = []
    slot_index: dict[tuple, int] = {}

    def declare(key: tuple, tau: float):
        if tau > 0.0:
            slot_index[key] = len(slot_taus)
            slot_taus.append(tau)

    for i, (tau, _) in enumerate(plant.Ad):
        declare(("Ad", i), tau)
    for i, (tau, _) in enumerate(plant.H):
        declare(("H", i), tau)
    for i, (tau, _) in enumerate(plant.B1):
        declare(("B1", i), tau)
    for i, (tau, _) in enumerate(plant.B2d):
        declare(("B2d", i), tau)
    declare(("ydel",), ctrl.y_delay)
    if need_gu:
        declare(("udel",), ctrl.u_delay)

    A0 = np.zeros((n, n))
    A_delayed = [np.zeros((n, n)) for _ in slot_taus]
    E = np.zeros((n, n))
    B = np.zeros((n, nw))
    C = np.zeros((plant.n_z, n))

    def A_at(key: tuple) -> NDArray[np.float64]:
        return A_delayed[slot_index[key]] if key in slot_index else A0

    dif = offs["gx"] if neutral else offs["x"]  # differential plant rows
    u_eff = offs["gu"] if need_gu else offs["u"]  # the u the plant sees

    # plant dynamics rows
    E[dif, dif] = np.eye(nx)
    A0[dif, offs["x"]] += plant.A
    for i, (_, M) in enumerate(plant.Ad):
        A_at(("Ad", i))[dif, offs["x"]] += M
    A0[dif, u_eff] += plant.B2
    for i, (_, M) in enumerate(plant.B2d):
        A_at(("B2d", i))[dif, u_eff] += M
    if need_gw:
        A0[dif, offs["gw"]] += plant.B0
        for i, (_, M) in enumerate(plant.B1):
            A_at(("B1", i))[dif, offs["gw"]] += M
    else:
        B[dif, :] += plant.B0

    if neutral:
        # algebraic rows defining gamma_x = x + sum H_k x(t-h_k)
        rows = offs["x"]
        A0[rows, offs["gx"]] += np.eye(nx)
        A0[rows, offs["x"]] -= np.eye(nx)
        for i, (_, M) in enumerate(plant.H):
            A_at(("H", i))[rows, offs["x"]] -= M

    # controller reads of y, possibly delayed and possibly folded
    def read_y(rows, G):
        """Add G @ y(t - y_delay) into the given rows."""
        if not G.size:
            return
        tgt = A_at(("ydel",))
        if need_y:
            tgt[rows, offs["y"]] += G
        else:
            tgt[rows, offs["x"]] += G @ plant.Cy

    if nc:
        E[offs["xc"], offs["xc"]] = np.eye(nc)
        A0[offs["xc"], offs["xc"]] += AK
        read_y(offs["xc"], BK)

    # u slack row: 0 = -u + CK x_c + DK y(t - y_delay)
    A0[offs["u"], offs["u"]] -= np.eye(nu)
    if nc:
        A0[offs["u"], offs["xc"]] += CK
    read_y(offs["u"], DK)

    if need_gu:
        # 0 = -gamma_u + u(t - u_delay)
        A0[offs["gu"], offs["gu"]] -= np.eye(nu)
        A_at(("udel",))[offs["gu"], offs["u"]] += np.eye(nu)

    if need_y:
        # 0 = -y + Cy x + Du u_eff + Dyw gamma_w
        A0[offs["y"], offs["y"]] -= np.eye(ny)
        A0[offs["y"], offs["x"]] += plant.Cy
        if plant.Du is not None:
            A0[offs["y"], u_eff] += plant.Du
        if plant.Dyw is not None:
            A0[offs["y"], offs["gw"]] += plant.Dyw

    if need_gw:
        # 0 = -gamma_w + w
        A0[offs["gw"], offs["gw"]] -= np.eye(nw)
        B[offs["gw"], :] += np.eye(nw)

    C[:, offs["x"]] += plant.Cz
    if plant.Dzu is not None:
        C[:, u_eff] += plant.Dzu
    if plant.Dz is not None:
        C[:, offs["gw"]] += plant.Dz

    return DdaeSystem.from_matrices(E, [A0] + A_delayed, slot_taus, B, C)


@dataclass(frozen=True)
class ClosedLoopTemplate:
    """Affine parameter map p -> DdaeSystem, with constant derivative data.

    ``const`` is the closed loop at p = 0; ``dA[k]`` lists, per parameter,
    the constant derivatives of each A matrix (aligned with const.delays).
    E, B, C never depend on p.
    """

    const: DdaeSystem
    dA: tuple[tuple[NDArray[np.float64], ...], ...]

    @property
    def n_params(self) -> int:
        return len(self.dA)

    def substitute(self, p) -> DdaeSystem:
        p = np.asarray(p, dtype=float).ravel()
        if p.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {p.size}")
        A = [Ai.copy() for Ai in self.const.A]
        for pk, dAk in zip(p, self.dA):
            for Ai, dAi in zip(A, dAk):
                Ai += pk * dAi
        return DdaeSystem.from_matrices(self.const.E, A,
                                        self.const.delays.taus,
                                        self.const.B, self.const.C)


def build_template(plant: PlantModel, ctrl: ControllerStructure) -> ClosedLoopTemplate:
    """Assemble the affine closed-loop map by probing unit parameter vectors.

    The construction is affine in p by design, so the map is exactly
    determined by the assembly at p = 0 and at each unit vector.
    """
    npar = ctrl.n_params
    const = _assemble(plant, ctrl, np.zeros(npar))
    dA = []
    for k in range(npar):
        e_k = np.zeros(npar)
        e_k[k] = 1.0
        sys_k = _assemble(plant, ctrl, e_k)
        dA.append(tuple(Ak - Ac for Ak, Ac in zip(sys_k.A, const.A)))
    return ClosedLoopTemplate(const=const, dA=tuple(dA))


def substitute_parameters(template: ClosedLoopTemplate, p) -> DdaeSystem:
    return template.substitute(p)


def interconnect(plant: PlantModel, ctrl: ControllerStructure, p) -> DdaeSystem:
    """Closed loop at parameters p, validated for well-posedness."""
    sys = _assemble(plant, ctrl, p)
    require_causality(sys, compute_nullspaces(sys))
    return sys
