"""Catalog metrics: complexity and connectivity ratings plus decomposition advice.

Complexity counts elements plus relationships: easy below 20 components,
moderate for 20-40 inclusive, complex above 40. Connectivity is the mean
number of relationship endpoints per element (a self-loop counts twice):
simple below 2, average for 2-3 inclusive, difficult above 3. The mean is
kept as an exact fraction so boundary values never misclassify; display
rounds to two decimals.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import EmptyModel
from .exchange import ModelDocument


class ComplexityRating(str, Enum):
    EASY = "Easy"
    MODERATE = "Moderate"
    COMPLEX = "Complex"


class ConnectivityRating(str, Enum):
    SIMPLE = "Simple"
    AVERAGE = "Average"
    DIFFICULT = "Difficult"


@dataclass(frozen=True)
class ComplexityScore:
    component_count: int
    rating: ComplexityRating


@dataclass(frozen=True)
class ConnectivityScore:
    mean_degree: Fraction
    rating: ConnectivityRating

    def display(self) -> str:
        return f"{float(self.mean_degree):.2f}"


@dataclass(frozen=True)
class Advisory:
    subdivide: bool
    reason: str


def complexity_rating(component_count: int) -> ComplexityRating:
    if component_count < 20:
        return ComplexityRating.EASY
    if component_count <= 40:
        return ComplexityRating.MODERATE
    return ComplexityRating.COMPLEX


def connectivity_rating(mean_degree: Fraction) -> ConnectivityRating:
    if mean_degree < 2:
        return ConnectivityRating.SIMPLE
    if mean_degree <= 3:
        return ConnectivityRating.AVERAGE
    return ConnectivityRating.DIFFICULT


def complexity_score(doc: ModelDocument) -> ComplexityScore:
    """Rate *doc* by its total component count (elements + relationships)."""
    count = len(doc.elements) + len(doc.relationships)
    return ComplexityScore(component_count=count, rating=complexity_rating(count))


def connectivity_score(doc: ModelDocument) -> ConnectivityScore:
    """Rate *doc* by its mean relationship endpoints per element.

    Each relationship contributes one endpoint to its source and one to its
    target, so the mean is ``2 * |relationships| / |elements|``. Raises
    :class:`EmptyModel` when the document has no elements.
    """
    if not doc.elements:
        raise EmptyModel(f"model {doc.model_id!r} has no elements; mean degree is undefined")
    mean = Fraction(2 * len(doc.relationships), len(doc.elements))
    return ConnectivityScore(mean_degree=mean, rating=connectivity_rating(mean))


def decomposition_advice(c: ComplexityScore, k: ConnectivityScore | None) -> Advisory:
    """Suggest subdividing when the model rates complex or difficult."""
    reasons = []
    if c.rating is ComplexityRating.COMPLEX:
        reasons.append(f"complexity is {c.rating.value} at {c.component_count} components")
    if k is not None and k.rating is ConnectivityRating.DIFFICULT:
        reasons.append(f"connectivity is {k.rating.value} at mean degree {k.display()}")
    if reasons:
        return Advisory(
            subdivide=True,
            reason="; ".join(reasons) + ": subdivide into sub-models or structure hierarchically",
        )
    return Advisory(subdivide=False, reason="within rating thresholds")
