# Project SynthRank - Copyright 2026 SynthRank contributors
# SPDX-License-Identifier: Apache-2.0
"""Molecular synthesizability ranking toolkit (python bindings)."""

try:  # installed layout: extension lives inside the package
    from ._synthrank import (
        Model,
        auc,
        binary_metrics,
        canonical_smiles,
        double_sigmoid_reward,
        feature_shapes,
        heavy_atom_count,
        kmeans_assignments,
        molecule_info,
        morgan_fingerprint,
        pairwise_loss,
        pcc,
        select_k,
        sigmoid_reward,
        strip_stereo,
        tanimoto,
    )
except ImportError:  # build-tree layout: extension sits on sys.path
    from _synthrank import (
        Model,
        auc,
        binary_metrics,
        canonical_smiles,
        double_sigmoid_reward,
        feature_shapes,
        heavy_atom_count,
        kmeans_assignments,
        molecule_info,
        morgan_fingerprint,
        pairwise_loss,
        pcc,
        select_k,
        sigmoid_reward,
        strip_stereo,
        tanimoto,
    )

__all__ = [
    "Model",
    "auc",
    "binary_metrics",
    "canonical_smiles",
    "double_sigmoid_reward",
    "feature_shapes",
    "heavy_atom_count",
    "kmeans_assignments",
    "molecule_info",
    "morgan_fingerprint",
    "pairwise_loss",
    "pcc",
    "select_k",
    "sigmoid_reward",
    "strip_stereo",
    "tanimoto",
]

__version__ = "0.1.0"
