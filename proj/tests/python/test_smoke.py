import math
import os

import numpy as np
import pytest

import boltzfold as bf


def test_fold_mfe():
    db, energy = bf.fold_mfe("GGGAAACCC")
    assert db == "(((...)))"
    assert energy == pytest.approx(-1.0)

    db, energy = bf.fold_mfe("AAAA")
    assert db == "...."
    assert energy == 0.0


def test_bad_sequence_raises():
    with pytest.raises(ValueError):
        bf.fold_mfe("GGXAAACCC")


def test_partition_function_and_energy():
    z, g = bf.partition_function("AAAA")
    assert z == pytest.approx(1.0)
    assert g == pytest.approx(0.0)

    z, g = bf.partition_function("GGGAAACCC")
    assert z > 1.0
    assert g == pytest.approx(-1.98e-3 * 310.15 * math.log(z))

    assert bf.structure_energy("GGGAAACCC", "(((...)))") == pytest.approx(-1.0)


def test_pair_probabilities_normalize():
    unpaired, pairs = bf.pair_probabilities("GGGAAACCC")
    for i, pu in enumerate(unpaired):
        row = pu + sum(p for (a, b), p in pairs.items() if i in (a, b))
        assert row == pytest.approx(1.0, abs=1e-9)


def test_ensemble_probabilities_sum_to_one():
    entries = bf.ensemble("GGGAAACCC")
    assert sum(p for _, _, p in entries) == pytest.approx(1.0)
    assert entries[0][0] == "(((...)))"  # lowest energy first in exhaustive mode

    # determinism of the sampled path
    a = bf.ensemble("G" * 12 + "A" * 3 + "C" * 20, n_samples=50, seed=3)
    b = bf.ensemble("G" * 12 + "A" * 3 + "C" * 20, n_samples=50, seed=3)
    assert a == b


def test_motzkin_and_fingerprints():
    assert bf.motzkin_path("(((...)))") == [1, 2, 3, 3, 3, 3, 2, 1, 0]

    faces = bf.expected_bag_of_faces("GGGAAACCC")
    assert set(faces) >= {"STACK@-2.0", "HAIRPIN:3@+3.0"}
    assert all(v >= 0 for v in faces.values())

    kmers = bf.kmer_counts("GGGAAACCC", k=4)
    assert sum(kmers.values()) == 6

    nbh = bf.expected_bag_of_neighborhoods("GGGAAACCC", radius=1)
    assert len(nbh) > 0


def test_selex_profiles():
    reads = os.environ["BOLTZFOLD_READS"]
    profiles = bf.selex_profiles(reads)
    assert len(profiles) == 40
    for p in profiles:
        assert 0.0 <= p["final_cpm_score"] <= 1.0
        assert p["label"] in ("NONE", "HC_LP", "LC_HP")


def test_analysis_roundtrip():
    rng = np.random.default_rng(0)
    blob = np.vstack(
        [rng.normal(c, 0.3, size=(15, 2)) for c in ((0, 0), (8, 0), (4, 7))]
    )
    m, h, obj = bf.nmf(np.abs(blob), topics=2, seed=1)
    assert m.shape == (45, 2) and h.shape == (2, 2)
    assert obj >= 0

    labels, silhouette = bf.spectral_clustering(blob, k_clusters=3, k_neighbors=5, seed=1)
    assert len(labels) == 45
    assert silhouette > 0.5

    y, kl = bf.tsne(blob, perplexity=10, iters=250, seed=1)
    assert y.shape == (45, 2)
    assert kl >= 0
