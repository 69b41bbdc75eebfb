"""Offensive-language tweet classification pipeline.

Thin python surface over the C++ core: preprocessing, TF-IDF features,
six classifier families, cross-validation and model persistence.
"""

from ._core import (
    Dataset,
    Example,
    IndexSequence,
    OfflangError,
    Pipeline,
    TfidfModel,
    Vocabulary,
    accuracy_score,
    augment_minority,
    build_vocabulary,
    clean,
    cross_validate,
    encode_padded,
    fit_tfidf,
    grad_check,
    lemmatize_verb,
    load_olid_tsv,
    load_pipeline,
    macro_f1_score,
    make_dataset,
    make_folds,
    max_corpus_length,
    porter_stem,
    preprocess_text,
    split_holdout,
    task_classes,
    tokenize,
    train,
)

__all__ = [
    "Dataset",
    "Example",
    "IndexSequence",
    "OfflangError",
    "Pipeline",
    "TfidfModel",
    "Vocabulary",
    "accuracy_score",
    "augment_minority",
    "build_vocabulary",
    "clean",
    "cross_validate",
    "encode_padded",
    "fit_tfidf",
    "grad_check",
    "lemmatize_verb",
    "load_olid_tsv",
    "load_pipeline",
    "macro_f1_score",
    "make_dataset",
    "make_folds",
    "max_corpus_length",
    "porter_stem",
    "preprocess_text",
    "split_holdout",
    "task_classes",
    "tokenize",
    "train",
]
