"""DNA secondary-structure ensembles, motif fingerprints, and SELEX analysis."""

try:
    from . import _boltzfold as _ext  # installed layout
except ImportError:
    import _boltzfold as _ext  # in-tree build on PYTHONPATH

ParseError = _ext.ParseError
ValidationError = _ext.ValidationError
ensemble = _ext.ensemble
expected_bag_of_faces = _ext.expected_bag_of_faces
expected_bag_of_neighborhoods = _ext.expected_bag_of_neighborhoods
fold_mfe = _ext.fold_mfe
kmer_counts = _ext.kmer_counts
motzkin_path = _ext.motzkin_path
nmf = _ext.nmf
pair_probabilities = _ext.pair_probabilities
partition_function = _ext.partition_function
selex_profiles = _ext.selex_profiles
spectral_clustering = _ext.spectral_clustering
structure_energy = _ext.structure_energy
tsne = _ext.tsne

__all__ = [
    "ParseError",
    "ValidationError",
    "ensemble",
    "expected_bag_of_faces",
    "expected_bag_of_neighborhoods",
    "fold_mfe",
    "kmer_counts",
    "motzkin_path",
    "nmf",
    "pair_probabilities",
    "partition_function",
    "selex_profiles",
    "spectral_clustering",
    "structure_energy",
    "tsne",
]
