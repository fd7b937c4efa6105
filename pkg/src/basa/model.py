"""Final trained model: feature mask, standardizer and classifier in one file."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ml
from .evaluation import fit_model
from .features import FeatureExtractor, feature_names, parse_mask

MODEL_SCHEMA = "basa.model/1"


class ModelFileError(ValueError):
    pass


@dataclass
class TrainedModel:
    algorithm: str
    mask: tuple
    names: tuple
    standardizer: ml.Standardizer
    classifier: object
    params: dict
    seed: int

    @classmethod
    def fit(cls, X, y, algorithm, mask, params, seed=42) -> "TrainedModel":
        mask = parse_mask(mask)
        X = ml.as_matrix(X)
        scaler = ml.Standardizer.fit(X)
        clf = fit_model(algorithm, scaler.transform(X), np.asarray(y), params, seed)
        return cls(algorithm, mask, tuple(feature_names(mask)), scaler, clf, dict(params), seed)

    @property
    def classes(self) -> list:
        return self.classifier.classes.tolist()

    def scores(self, X) -> np.ndarray:
        """Per-class tree votes (rf) or decision values (svm)."""
        Z = self.standardizer.transform(X)
        if self.algorithm == "rf":
            return self.classifier.votes(Z)
        return self.classifier.decision_function(Z)

    def predict(self, X) -> np.ndarray:
        return self.classifier.predict(self.standardizer.transform(X))

    def predict_text(self, text: str, extractor: FeatureExtractor, doc_id: str = "") -> dict:
        vec = extractor.extract(text, doc_id, mask=self.mask)
        X = np.asarray([vec.values])
        scores = self.scores(X)[0]
        label = self.predict(X)[0]
        kind = "votes" if self.algorithm == "rf" else "decision_values"
        return {
            "label": int(label),
            kind: {str(c): (int(s) if self.algorithm == "rf" else float(s))
                   for c, s in zip(self.classes, scores)},
        }

    def to_dict(self) -> dict:
        clf = self.classifier.to_dict()
        return {
            "schema": MODEL_SCHEMA,
            "algorithm": self.algorithm,
            "mask": list(self.mask),
            "feature_names": list(self.names),
            "classes": self.classes,
            "params": self.params,
            "seed": self.seed,
            "standardizer": self.standardizer.to_dict(),
            "classifier": clf,
        }

    @classmethod
    def from_dict(cls, d) -> "TrainedModel":
        if d.get("schema") != MODEL_SCHEMA:
            raise ModelFileError(f"not a {MODEL_SCHEMA} model file")
        mask = parse_mask(d["mask"])
        names = tuple(d["feature_names"])
        if names != tuple(feature_names(mask)):
            raise ModelFileError("feature names do not match the model's feature mask")
        classes = d["classes"]
        if d["algorithm"] == "rf":
            clf = ml.RandomForest.from_dict(d["classifier"], classes, len(names))
        elif d["algorithm"] == "svm":
            clf = ml.LinearSvm.from_dict(d["classifier"], classes)
        else:
            raise ModelFileError(f"unknown algorithm {d['algorithm']!r}")
        return cls(d["algorithm"], mask, names, ml.Standardizer.from_dict(d["standardizer"]),
                   clf, dict(d["params"]), int(d["seed"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def load(cls, path) -> "TrainedModel":
        try:
            return cls.from_dict(json.loads(Path(path).read_text("utf-8")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ModelFileError(f"{path}: malformed model file ({exc})") from None
