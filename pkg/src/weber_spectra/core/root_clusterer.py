import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sklearn.cluster import DBSCAN
from sklearn.neighbors import NearestNeighbors

from .errors import MatchAmbiguityError

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-9


def _as_points(values: Sequence[complex]) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    return np.column_stack([values.real, values.imag])


def _tie_key(nu: complex) -> Tuple[float, float, float]:
    # меньший |Im|, затем меньший Re, затем больший Im
    return abs(nu.imag), nu.real, -nu.imag


def _same_key(left: Tuple[float, ...], right: Tuple[float, ...]) -> bool:
    return all(abs(a - b) <= TIE_TOLERANCE for a, b in zip(left, right))


class RootClusterer:
    """Группировка корней на комплексной плоскости

    deduplicate склеивает повторные находки одного корня (DBSCAN с радиусом
    dedup_radius), match_slice сопоставляет корни соседних срезов по r
    жадно по расстоянию в пределах match_radius.
    """

    def __init__(self, radius: float = 1e-8):
        self.radius = radius

    def deduplicate(self, roots: List) -> List:
        """Оставляет по одному корню из каждой группы ближе radius, с наименьшей невязкой"""
        if len(roots) < 2:
            return list(roots)

        labels = DBSCAN(eps=self.radius, min_samples=1).fit_predict(_as_points([root.nu for root in roots]))

        groups: Dict[int, List] = {}
        for label, root in zip(labels, roots):
            groups.setdefault(int(label), []).append(root)

        unique = []
        for label in sorted(groups):
            members = groups[label]
            best = min(members, key=lambda root: root.residual)
            if len(members) > 1:
                logger.warning(f"Корень {best.nu} найден {len(members)} раз, дубликаты отброшены")
            unique.append(best)
        return unique

    def match_slice(self, anchors: Sequence[complex], candidates: Sequence[complex],
                    match_radius: float) -> Dict[int, int]:
        """Сопоставление {индекс ветви: индекс кандидата}

        Пары перебираются по возрастанию расстояния; кандидаты одной ветви,
        равноудаленные с точностью 1e-9, различаются ключом _tie_key.
        """
        if len(anchors) == 0 or len(candidates) == 0:
            return {}

        neighbors = NearestNeighbors(radius=match_radius).fit(_as_points(candidates))
        distances, indices = neighbors.radius_neighbors(_as_points(anchors), sort_results=True)

        pairs = []
        for anchor, (dist_row, index_row) in enumerate(zip(distances, indices)):
            for distance, candidate in zip(dist_row, index_row):
                pairs.append((float(distance), anchor, int(candidate)))
        pairs.sort()

        candidates = [complex(c) for c in candidates]
        mapping: Dict[int, int] = {}
        taken = set()
        for distance, anchor, _ in pairs:
            if anchor in mapping:
                continue
            tied = [c for d, a, c in pairs
                    if a == anchor and c not in taken and abs(d - distance) <= TIE_TOLERANCE]
            if not tied:
                continue
            tied.sort(key=lambda c: _tie_key(candidates[c]))
            if len(tied) > 1 and _same_key(_tie_key(candidates[tied[0]]), _tie_key(candidates[tied[1]])):
                raise MatchAmbiguityError(
                    f"Ветвь {anchor}: кандидаты {candidates[tied[0]]} и {candidates[tied[1]]} неразличимы"
                )
            mapping[anchor] = tied[0]
            taken.add(tied[0])

        logger.debug(f"Сопоставлено {len(mapping)} из {len(anchors)} ветвей")
        return mapping
