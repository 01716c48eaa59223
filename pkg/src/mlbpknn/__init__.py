"""MLBP texture descriptors with a Tanimoto-distance k-NN classifier."""
from .classify import (KnnClassifier, KnnConfig, Prediction, Sample, euclidean_distance,
                       knn_classify, tanimoto_distance)
from .datastore import (FeatureStore, Manifest, read_features, read_manifest, scan_directory,
                        write_features)
from .errors import DataError
from .evaluate import (EvalReport, FoldPlan, TimingStats, benchmark_runtime, cross_validate,
                       stratified_kfold)
from .imageprep import (PreprocessConfig, gaussian_smooth, load_image, preprocess,
                        resize_bilinear)
from .mlbp import (BinaryPattern, NeighborhoodSpec, bilinear_at, extract, histogram_features,
                   label_image, lbp_code, mlbp_label, sample_neighbors, uniformity)

__version__ = "0.1.0"
