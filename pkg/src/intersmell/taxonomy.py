"""Classification of a (source, target) dataset pair.

Three predicates drive everything: do the feature spaces match (as sets of
metric names), do the two datasets describe the same smell, and do they come
from the same language domain. The eight combinations map onto named
sub-scenarios, a position in the interaction taxonomy, and a recommended
detection technique.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .dataset_io import DatasetDescriptor

__all__ = [
    "SubScenario",
    "ScenarioLabel",
    "DomainCategory",
    "SmellRelation",
    "FeatureRelation",
    "InteractionLocus",
    "TaxonomyPath",
    "Technique",
    "TechniqueHint",
    "classify_scenario",
    "taxonomy_path",
    "recommend_technique",
]


class SubScenario(Enum):
    S1_1 = "1.1"
    S1_2 = "1.2"
    S2_1 = "2.1"
    S2_2 = "2.2"
    S3_1 = "3.1"
    S3_2 = "3.2"
    S3_3 = "3.3"
    S3_4 = "3.4"


_NAMES: dict[SubScenario, tuple[str, str]] = {
    SubScenario.S1_1: ("Intra SD_iD", "Intra-smell Detection within domain"),
    SubScenario.S1_2: ("Inter SD_iD", "Inter-smell Detection within domain"),
    SubScenario.S2_1: ("Intra SD_hD", "Intra-smell Detection within heterogeneous domain"),
    SubScenario.S2_2: ("Inter SD_hD", "Inter-smell Detection within heterogeneous domain"),
    SubScenario.S3_1: ("Intra SD_cD", "Intra-smell Detection within cross-domain"),
    SubScenario.S3_2: ("Inter SD_cD", "Inter-smell Detection within cross-domain"),
    SubScenario.S3_3: ("Intra SD_hcD", "Intra-smell Detection within heterogeneous cross-domain"),
    SubScenario.S3_4: ("Inter SD_hcD", "Inter-smell Detection within heterogeneous cross-domain"),
}

# (features_equal, smell_equal, language_equal) -> sub-scenario
_TRUTH_TABLE: dict[tuple[bool, bool, bool], SubScenario] = {
    (True, True, True): SubScenario.S1_1,
    (True, False, True): SubScenario.S1_2,
    (False, True, True): SubScenario.S2_1,
    (False, False, True): SubScenario.S2_2,
    (True, True, False): SubScenario.S3_1,
    (True, False, False): SubScenario.S3_2,
    (False, True, False): SubScenario.S3_3,
    (False, False, False): SubScenario.S3_4,
}


@dataclass(frozen=True)
class ScenarioLabel:
    sub_scenario: SubScenario
    abbreviation: str
    long_name: str


def _label(sub: SubScenario) -> ScenarioLabel:
    abbr, long_name = _NAMES[sub]
    return ScenarioLabel(sub, abbr, long_name)


def classify_scenario(src: DatasetDescriptor, tgt: DatasetDescriptor) -> ScenarioLabel:
    """Place a source/target pair into one of the eight sub-scenarios.

    Feature spaces compare as SETS of names (column order is handled by the
    experiment runner); languages compare case-insensitively.
    """
    features_equal = set(src.feature_names) == set(tgt.feature_names)
    smell_equal = src.smell == tgt.smell
    language_equal = src.language.lower() == tgt.language.lower()
    return _label(_TRUTH_TABLE[(features_equal, smell_equal, language_equal)])


class DomainCategory(Enum):
    SAME_DOMAIN = "same_domain"
    CROSS_DOMAIN = "cross_domain"


class SmellRelation(Enum):
    INTRA_SMELL = "intra_smell"
    INTER_SMELL = "inter_smell"


class FeatureRelation(Enum):
    HOMOGENEOUS = "homogeneous"
    HETEROGENEOUS = "heterogeneous"


class InteractionLocus(Enum):
    WITHIN_PROJECT = "within_project"
    ACROSS_PROJECTS = "across_projects"
    GROUP_OF_PROJECTS = "group_of_projects"


@dataclass(frozen=True)
class TaxonomyPath:
    domain_category: DomainCategory
    smell_relation: SmellRelation
    feature_relation: FeatureRelation
    interaction_locus: InteractionLocus


_INTER_SMELL = {SubScenario.S1_2, SubScenario.S2_2, SubScenario.S3_2, SubScenario.S3_4}
_HOMOGENEOUS = {SubScenario.S1_1, SubScenario.S1_2, SubScenario.S3_1, SubScenario.S3_2}
_SAME_DOMAIN = {SubScenario.S1_1, SubScenario.S1_2, SubScenario.S2_1, SubScenario.S2_2}


def taxonomy_path(label: ScenarioLabel) -> TaxonomyPath:
    """Where a sub-scenario sits in the interaction taxonomy.

    The locus is fixed to across-projects: this artifact always compares two
    dataset files. The within-project and group-of-projects branches exist in
    the enum for completeness but are never produced.
    """
    sub = label.sub_scenario
    return TaxonomyPath(
        domain_category=(
            DomainCategory.SAME_DOMAIN if sub in _SAME_DOMAIN else DomainCategory.CROSS_DOMAIN
        ),
        smell_relation=(
            SmellRelation.INTER_SMELL if sub in _INTER_SMELL else SmellRelation.INTRA_SMELL
        ),
        feature_relation=(
            FeatureRelation.HOMOGENEOUS if sub in _HOMOGENEOUS else FeatureRelation.HETEROGENEOUS
        ),
        interaction_locus=InteractionLocus.ACROSS_PROJECTS,
    )


class Technique(Enum):
    CONVENTIONAL_ML = "conventional_ml"
    HOMOGENEOUS_TRANSFER_LEARNING = "homogeneous_transfer_learning"
    HETEROGENEOUS_TRANSFER_LEARNING = "heterogeneous_transfer_learning"


@dataclass(frozen=True)
class TechniqueHint:
    technique: Technique
    rationale: str


def recommend_technique(label: ScenarioLabel, distributions_similar: bool) -> TechniqueHint:
    """Pick the detection technique for a scenario.

    Heterogeneous feature spaces always call for heterogeneous transfer
    learning. With matching feature spaces the choice hinges on whether the
    two data distributions are similar; callers typically derive that flag
    from an MMD permutation test.
    """
    path = taxonomy_path(label)
    if path.feature_relation is FeatureRelation.HETEROGENEOUS:
        return TechniqueHint(
            Technique.HETEROGENEOUS_TRANSFER_LEARNING,
            "source and target use different feature sets, so knowledge must be "
            "mapped across feature spaces",
        )
    if distributions_similar:
        return TechniqueHint(
            Technique.CONVENTIONAL_ML,
            "source and target share one feature space with similar "
            "distributions, so a model fit on the source applies directly",
        )
    return TechniqueHint(
        Technique.HOMOGENEOUS_TRANSFER_LEARNING,
        "feature spaces match but the distributions diverge, so the source "
        "model needs distribution alignment before serving the target",
    )
