"""Built-in example presentations, as PresentationFile models."""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Dict, List, Sequence, Tuple

from .errors import UnknownExample
from .models import (
    GammaGeneratorSpec,
    GammaSpec,
    IotaSpec,
    OrbitActionSpec,
    OrbitSpec,
    PresentationFile,
)

SUPPORTED_RANGES: Dict[str, Tuple[int, int]] = {
    "z2sum": (2, 4),
    "star": (3, 4),
    "hyperoct": (2, 3),
    "hyperpair": (3, 3),
    "cyclic": (2, 6),
}


def _cycle(n: int) -> List[int]:
    return [(i + 1) % n for i in range(n)]


def _swap(degree: int, a: int, b: int) -> List[int]:
    images = list(range(degree))
    images[a], images[b] = b, a
    return images


def _symmetric_generators(n: int) -> List[GammaGeneratorSpec]:
    gens = [GammaGeneratorSpec(name="a", images=_swap(n, 0, 1))]
    if n > 2:
        gens.append(GammaGeneratorSpec(name="b", images=_cycle(n)))
    return gens


def _natural_orbit(name: str, gens: Sequence[GammaGeneratorSpec]) -> OrbitSpec:
    n = len(gens[0].images)
    return OrbitSpec(
        rep_name=name,
        domain_size=n,
        action=[OrbitActionSpec(generator=g.name, images=list(g.images)) for g in gens],
    )


def z2sum(n: int) -> PresentationFile:
    gens = _symmetric_generators(n)
    return PresentationFile(
        name=f"z2sum-{n}",
        gamma=GammaSpec(degree=n, generators=gens),
        orbits=[_natural_orbit("s", gens)],
        relators=["s.0^2", "[s.0, s.1]"],
    )


def star(n: int) -> PresentationFile:
    gens = _symmetric_generators(n)
    return PresentationFile(
        name=f"star-{n}",
        gamma=GammaSpec(degree=n, generators=gens),
        orbits=[_natural_orbit("s", gens)],
        relators=["s.0^2", "(s.0 s.1)^3", "(s.0 s.1 s.2)^4", "(s.0 s.1 s.0 s.2)^2"],
    )


# Signed permutations of n coordinates act on 2n points: k is +e_k, n + k is -e_k.


def _rotation(n: int) -> List[int]:
    return [(k - 1) % n + (n if k >= n else 0) for k in range(2 * n)]


def _signed_swap(n: int, i: int, j: int) -> List[int]:
    images = _swap(2 * n, i, j)
    images[n + i], images[n + j] = n + j, n + i
    return images


def _flip(n: int, k: int) -> List[int]:
    return _swap(2 * n, k, n + k)


def _on_coordinates(images: Sequence[int], n: int) -> List[int]:
    return [images[k] % n for k in range(n)]


def _on_pairs(images: Sequence[int], n: int) -> List[int]:
    pairs = list(combinations(range(n), 2))
    index = {pair: i for i, pair in enumerate(pairs)}
    return [index[tuple(sorted((images[i] % n, images[j] % n)))] for i, j in pairs]


def _signed_orbit(name: str, gens: Sequence[GammaGeneratorSpec], n: int, on_pairs: bool = False) -> OrbitSpec:
    induced = _on_pairs if on_pairs else _on_coordinates
    action = [OrbitActionSpec(generator=g.name, images=induced(g.images, n)) for g in gens]
    return OrbitSpec(rep_name=name, domain_size=len(action[0].images), action=action)


def _product(*perms: Sequence[int]) -> List[int]:
    out = list(range(len(perms[0])))
    for perm in perms:
        out = [perm[x] for x in out]
    return out


def hyperoct(n: int) -> PresentationFile:
    gens = [
        GammaGeneratorSpec(name="c", images=_rotation(n)),
        GammaGeneratorSpec(name="t", images=_flip(n, 0)),
    ]
    return PresentationFile(
        name=f"hyperoct-{n}",
        gamma=GammaSpec(degree=2 * n, generators=gens),
        orbits=[_signed_orbit("s", gens, n)],
        relators=["s.0^2"],
        mode="weak",
        iota=[IotaSpec(symbol="s.0", images=_flip(n, 0))],
    )


def hyperpair(n: int) -> PresentationFile:
    gens = [
        GammaGeneratorSpec(name="u", images=_signed_swap(n, 0, 1)),
        GammaGeneratorSpec(name="v", images=_signed_swap(n, 1, 2)),
        GammaGeneratorSpec(name="t", images=_flip(n, 0)),
    ]
    return PresentationFile(
        name=f"hyperpair-{n}",
        gamma=GammaSpec(degree=2 * n, generators=gens),
        orbits=[_signed_orbit("s", gens, n), _signed_orbit("p", gens, n, on_pairs=True)],
        relators=["s.0^2", "p.0^-1 s.0 s.1"],
        mode="weak",
        iota=[
            IotaSpec(symbol="s.0", images=_flip(n, 0)),
            IotaSpec(symbol="p.0", images=_product(_flip(n, 0), _flip(n, 1))),
        ],
    )


def cyclic(n: int) -> PresentationFile:
    gen = GammaGeneratorSpec(name="c", images=_cycle(n))
    return PresentationFile(
        name=f"cyclic-{n}",
        gamma=GammaSpec(degree=n, generators=[gen]),
        orbits=[OrbitSpec(rep_name="a", domain_size=1, action=[OrbitActionSpec(generator="c", images=[0])])],
        relators=[f"a.0^{n}"],
        mode="weak",
        iota=[IotaSpec(symbol="a.0", images=_cycle(n))],
    )


BUILDERS: Dict[str, Callable[[int], PresentationFile]] = {
    "z2sum": z2sum,
    "star": star,
    "hyperoct": hyperoct,
    "hyperpair": hyperpair,
    "cyclic": cyclic,
}


def builtin(name: str, n: int) -> PresentationFile:
    if name not in BUILDERS:
        raise UnknownExample(f"unknown example '{name}'; choose from {sorted(BUILDERS)}")
    low, high = SUPPORTED_RANGES[name]
    if not low <= n <= high:
        raise UnknownExample(f"example '{name}' supports n in {low}..{high}, got {n}")
    return BUILDERS[name](n)
