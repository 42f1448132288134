"""Confusion matrix, accuracy and macro-averaged precision / recall / F1."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from eyefresh.errors import ConfigError

LABELS = (0, 1, 2)


@dataclass
class EvalReport:
    confusion: list[list[int]]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict[str, dict[str, float]]

    def to_json(self) -> dict:
        return asdict(self)

    def confusion_text(self, names=("HighlyFresh", "Fresh", "NotFresh")) -> str:
        width = max(len(n) for n in names) + 2
        lines = ["true \\ pred".ljust(width) + "".join(n.rjust(width) for n in names)]
        for name, row in zip(names, self.confusion):
            lines.append(name.ljust(width) + "".join(str(v).rjust(width) for v in row))
        return "\n".join(lines)


def confusion_matrix(y_true, y_pred, labels=LABELS) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    y_true, y_pred = np.asarray(y_true), np.asarray(y_pred)
    index = {label: i for i, label in enumerate(labels)}
    cm = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(y_true.tolist(), y_pred.tolist()):
        if t not in index or p not in index:
            raise ConfigError(f"label outside {labels}: true={t}, pred={p}")
        cm[index[t], index[p]] += 1
    return cm


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def report_from_confusion(cm) -> EvalReport:
    cm = np.asarray(cm, dtype=np.int64)
    total = cm.sum()
    tp = np.diag(cm).astype(np.float64)
    predicted = cm.sum(axis=0)
    actual = cm.sum(axis=1)
    per_class = {}
    precision, recall, f1 = [], [], []
    for k in range(cm.shape[0]):
        p = _ratio(tp[k], predicted[k])
        r = _ratio(tp[k], actual[k])
        f = _ratio(2 * p * r, p + r)
        precision.append(p)
        recall.append(r)
        f1.append(f)
        per_class[str(k)] = {"precision": p, "recall": r, "f1": f, "support": int(actual[k])}
    return EvalReport(
        confusion=cm.tolist(),
        accuracy=float(tp.sum() / total) if total else 0.0,
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f1=float(np.mean(f1)),
        per_class=per_class,
    )


def evaluate(y_true, y_pred, labels=LABELS) -> EvalReport:
    """Evaluate predictions; absent classes contribute 0 to every macro mean."""
    if len(y_true) != len(y_pred):
        raise ConfigError(f"length mismatch: {len(y_true)} true labels vs {len(y_pred)} predictions")
    if len(y_true) == 0:
        raise ConfigError("cannot evaluate an empty prediction set")
    return report_from_confusion(confusion_matrix(y_true, y_pred, labels))
