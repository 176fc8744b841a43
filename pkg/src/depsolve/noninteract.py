"""Syntactic non-interaction criteria between atom and dependency classes.

When the criteria hold, implication for the mixed set can be decided by the
single-class engines separately. The criteria are sufficient only: a failed
check means "no guarantee", not "interaction exists".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .core import FD, IA, IND, DependencySet
from .polyengine import AlgOneResult, algorithm1


def splits(ia: IA, target: Union[FD, IND]) -> bool:
    """Does the atom hit the FD's left side (or the IND's target side) from both sides?"""
    if isinstance(target, FD):
        u = target.lhs
        return bool((ia.left - ia.right) & u) and bool((ia.right - ia.left) & u)
    w = frozenset(target.rhs_seq)
    return bool(ia.left & w) and bool(ia.right & w)


def intersects(ia: IA, target: Union[FD, IND]) -> bool:
    """Does the atom touch the FD's left side (or the IND's target side) at all?"""
    span = ia.left | ia.right
    if isinstance(target, FD):
        return bool(span & target.lhs)
    return bool(span & frozenset(target.rhs_seq))


@dataclass(frozen=True)
class NonInteractionReport:
    mode: str  # "finite" | "unrestricted"
    guaranteed: bool
    witnesses: tuple[tuple[IA, Union[FD, IND]], ...]
    transformed: Optional[AlgOneResult] = None

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "guaranteed": self.guaranteed,
            "witnesses": [[str(ia), str(dep)] for ia, dep in self.witnesses],
        }
        if self.transformed is not None:
            out["constants"] = sorted(self.transformed.constants)
            out["widened_atoms"] = [str(ia) for ia in self.transformed.ia_star]
        return out


def noninteract_ind_ia(
    inds: Iterable[IND], ias: Iterable[IA], mode: str = "finite"
) -> NonInteractionReport:
    """Inclusions and atoms cannot interact when no atom splits any inclusion."""
    witnesses = tuple(
        (ia, ind) for ia in ias for ind in inds if splits(ia, ind)
    )
    return NonInteractionReport(mode, not witnesses, witnesses)


def noninteract_fd_ia(
    fds: Iterable[FD], ias: Iterable[IA], mode: str = "finite"
) -> NonInteractionReport:
    """Split/intersection criteria for FDs with IAs.

    Unrestricted mode first widens the sets, then requires that no widened
    atom splits a widened FD. Finite mode requires the stronger condition
    that no raw atom intersects a raw FD; it also makes the finite and
    unrestricted problems coincide.
    """
    fds = list(fds)
    ias = list(ias)
    if mode == "unrestricted":
        transformed = algorithm1(fds, ias)
        star_fds = list(transformed.fd_star)
        witnesses = tuple(
            (ia, fd)
            for ia in transformed.ia_star
            for fd in star_fds
            if splits(ia, fd)
        )
        return NonInteractionReport(mode, not witnesses, witnesses, transformed)
    if mode != "finite":
        raise ValueError(f"unknown mode {mode}")
    witnesses = tuple((ia, fd) for ia in ias for fd in fds if intersects(ia, fd))
    return NonInteractionReport(mode, not witnesses, witnesses)


def noninteract_report(sigma: DependencySet, mode: str) -> NonInteractionReport:
    """Convenience dispatcher over a whole dependency set."""
    fds, ias, inds = sigma.fds(), sigma.ias(), sigma.inds()
    if fds and inds:
        raise ValueError("non-interaction criteria cover FD+IA and IND+IA sets")
    if inds:
        return noninteract_ind_ia(inds, ias, mode)
    return noninteract_fd_ia(fds, ias, mode)
