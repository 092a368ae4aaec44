from __future__ import annotations

from scipy.optimize import bisect

from lorenzlab.errors import NoRootInBranch, NoSuchBranch
from lorenzlab.maps.base import BISECT_MAXITER, BISECT_RTOL, BISECT_XTOL, LorenzMap, iterate_word
from lorenzlab.schemas.common import Side

DEFAULT_RESIDUAL_TOL = 1e-12


def _side(symbol: str) -> Side:
    return Side.LEFT if symbol == "0" else Side.RIGHT


def locate_branch(lmap: LorenzMap, word: str) -> tuple[float, float]:
    """Maximal interval on which the first len(word) iterates follow `word`.

    Pulled back from the last symbol's domain through inverse branches.
    """
    if not word:
        raise NoSuchBranch(word)
    lo, hi = lmap.branch_domain(_side(word[-1]))
    for symbol in reversed(word[:-1]):
        side = _side(symbol)
        range_lo, range_hi = lmap.branch_range(side)
        lo, hi = max(lo, range_lo), min(hi, range_hi)
        if not lo < hi:
            raise NoSuchBranch(word)
        lo, hi = lmap.inverse_branch(lo, side), lmap.inverse_branch(hi, side)
    if not lo < hi:
        raise NoSuchBranch(word)
    return lo, hi


def periodic_residual(lmap: LorenzMap, x: float, word: str) -> float:
    return abs(iterate_word(lmap, x, word) - x)


def find_periodic_boundary(
    lmap: LorenzMap,
    word: str,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> float:
    """Fixed point of f^len(word) on the branch with itinerary `word`."""
    lo, hi = locate_branch(lmap, word)

    def displacement(x: float) -> float:
        return iterate_word(lmap, x, word) - x

    at_lo, at_hi = displacement(lo), displacement(hi)
    if at_lo == 0.0:
        root = lo
    elif at_hi == 0.0:
        root = hi
    elif (at_lo < 0.0) == (at_hi < 0.0):
        raise NoRootInBranch(word)
    else:
        root = bisect(displacement, lo, hi, xtol=BISECT_XTOL, rtol=BISECT_RTOL, maxiter=BISECT_MAXITER)
    residual = abs(displacement(root))
    if residual >= residual_tol:
        raise NoRootInBranch(word, f"residual {residual!r} above {residual_tol!r}")
    return root
