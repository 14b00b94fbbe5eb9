"""Learning methods for FR/NFR classification and NFR sub-classification."""

from .bnb import BnbError, BnbModel, binarize, predict_bnb, train_bnb
from .clustering import ClusterError, ClusterModel, cluster_hierarchical, cluster_hybrid, cluster_kmeans
from .labels import LabelMap, assign_cluster_labels, assign_labels, assign_topic_labels, majority_label
from .topics import BtmModel, LdaModel, TopicModelError, extract_biterms, train_btm, train_lda
from .tree import DecisionTree, TreeError, predict_tree, train_tree
from .vectors import DocTermVector, Vocabulary, doc_distance, pairwise_distances, tfidf

__all__ = [
    "BnbError", "BnbModel", "binarize", "predict_bnb", "train_bnb",
    "ClusterError", "ClusterModel", "cluster_hierarchical", "cluster_hybrid", "cluster_kmeans",
    "LabelMap", "assign_cluster_labels", "assign_labels", "assign_topic_labels", "majority_label",
    "BtmModel", "LdaModel", "TopicModelError", "extract_biterms", "train_btm", "train_lda",
    "DecisionTree", "TreeError", "predict_tree", "train_tree",
    "DocTermVector", "Vocabulary", "doc_distance", "pairwise_distances", "tfidf",
]
