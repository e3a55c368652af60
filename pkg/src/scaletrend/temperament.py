"""Deviation of a scale estimate from the equal-tempered 100-cent grid.

The deviation of a pair of scale tones is the distance of their interval
to the nearest multiple of 100 cents, folded into [0, 50]. A song's score
is the mean over all unordered pairs of its component means.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import InsufficientComponentsError
from .scale_model import ScaleEstimate

SEMITONE_CENTS = 100.0


@dataclass(frozen=True)
class TemperamentError:
    song_id: str
    epsilon_s: float
    n_pairs: int
    per_pair: tuple[tuple[int, int, float], ...] | None = None

    def to_dict(self) -> dict:
        return {
            "song_id": self.song_id,
            "epsilon_s": float(self.epsilon_s),
            "n_pairs": int(self.n_pairs),
        }


def pair_epsilon(n_i: float, n_j: float) -> float:
    """Distance of |n_i - n_j| to the nearest 100-cent multiple, in [0, 50]."""
    d = abs(n_i - n_j) % SEMITONE_CENTS
    return min(d, SEMITONE_CENTS - d)


def means_epsilon(means, song_id: str = "", keep_pairs: bool = False) -> TemperamentError:
    """Mean pairwise grid deviation of a sequence of scale-tone values."""
    means = list(means)
    if len(means) < 2:
        raise InsufficientComponentsError(
            f"{song_id}: need >= 2 components, got {len(means)}"
        )
    pairs = [
        (i, j, pair_epsilon(means[i], means[j]))
        for i, j in combinations(range(len(means)), 2)
    ]
    eps = sum(p[2] for p in pairs) / len(pairs)
    return TemperamentError(
        song_id=song_id,
        epsilon_s=eps,
        n_pairs=len(pairs),
        per_pair=tuple(pairs) if keep_pairs else None,
    )


def song_epsilon(estimate: ScaleEstimate, keep_pairs: bool = False) -> TemperamentError:
    """Per-song average deviation of the fitted component means."""
    return means_epsilon(
        estimate.gmm.means_cents, song_id=estimate.song_id, keep_pairs=keep_pairs
    )
