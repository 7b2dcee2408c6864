"""Factorization - cosine matrix factorization, EMF and the random baseline.

The prediction for (i, j) is the cosine c = t3 / t2 of the user and item
vectors, rescaled to the rating range. EMF minimizes, per observed pair,

    L_ij = (R_ij / max_rating - c)^2 - lambda * ES_model(i, j)

where ES_model substitutes c for the rating in the Emotional Score:
B * t2 / t3 for Popular items and B * c for Obscure items, with
B = lambda / (score_j * count_j). Near-zero t3 is clamped to
sign(t3) * cosine_floor * t2, inside which the Popular term is constant.

Every gradient is a linear combination of U_i and V_j, so the step is
computed from four scalar coefficients.
"""
import json
import math
from pathlib import Path
from typing import Optional, Protocol

import numpy as np

from emotion_core.exceptions import ArtifactIOError, ConfigError, DataValidationError, DivergenceError, GradientError, StatsError
from emotion_core.logging_config import get_logger
from emotion_core.models.dataset import RatingDataset
from emotion_core.models.factor import FactorModel, GradientScratch, TrainConfig
from emotion_core.models.stats import ItemStats
from emotion_core.services.manifest import derive_seed

logger = get_logger("factorization")

MODEL_MAGIC = b"EMFMODEL 1"
LOSS_CHUNK = 65536


class Predictor(Protocol):
    """Rating predictor contract accepted by the evaluation harness."""

    max_rating: float

    def predict(self, i: int, j: int) -> float: ...

    def predict_pairs(self, users: np.ndarray, items: np.ndarray) -> np.ndarray: ...

    def score_user(self, i: int, n_items: int) -> np.ndarray: ...


# ==================== Model construction ====================

def init_model(n_users: int, n_items: int, config: TrainConfig, max_rating: float = 5.0) -> FactorModel:
    """Uniform (0, init_scale] factors from the ``init`` sub-seed.

    Strictly positive entries make every initial norm and dot product nonzero.
    """
    if n_users < 1 or n_items < 1:
        raise ConfigError(f"Model needs at least one user and one item, got N={n_users}, M={n_items}")
    rng = np.random.default_rng(derive_seed(config.seed, "init"))
    U = config.init_scale * (1.0 - rng.random((n_users, config.d)))
    V = config.init_scale * (1.0 - rng.random((n_items, config.d)))
    return FactorModel(U=U, V=V, max_rating=max_rating, config=config)


def predicted_cosine(model: FactorModel, i: int, j: int) -> float:
    u, v = model.U[i], model.V[j]
    floor = model.config.norm_floor
    t2 = max(math.sqrt(float(u @ u)), floor) * max(math.sqrt(float(v @ v)), floor)
    return min(1.0, max(-1.0, float(u @ v) / t2))


def predict(model: FactorModel, i: int, j: int) -> float:
    """Cosine of U_i and V_j times max_rating, clamped to [1, max_rating]."""
    return min(model.max_rating, max(1.0, predicted_cosine(model, i, j) * model.max_rating))


class FactorPredictor:
    """Vectorized predictions of a trained factor model."""

    def __init__(self, model: FactorModel):
        self.model = model
        self.max_rating = model.max_rating
        floor = model.config.norm_floor
        self._user_norms = np.maximum(np.linalg.norm(model.U, axis=1), floor)
        self._item_norms = np.maximum(np.linalg.norm(model.V, axis=1), floor)

    def _to_rating(self, cosine: np.ndarray) -> np.ndarray:
        return np.clip(np.clip(cosine, -1.0, 1.0) * self.max_rating, 1.0, self.max_rating)

    def predict(self, i: int, j: int) -> float:
        return predict(self.model, i, j)

    def predict_pairs(self, users: np.ndarray, items: np.ndarray) -> np.ndarray:
        dots = np.einsum("ij,ij->i", self.model.U[users], self.model.V[items])
        return self._to_rating(dots / (self._user_norms[users] * self._item_norms[items]))

    def score_user(self, i: int, n_items: int) -> np.ndarray:
        dots = self.model.V[:n_items] @ self.model.U[i]
        return self._to_rating(dots / (self._item_norms[:n_items] * self._user_norms[i]))


# ==================== Random placement ====================

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)
_SHIFTS = (np.uint64(30), np.uint64(27), np.uint64(31))
_MANTISSA_SHIFT = np.uint64(11)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = x + _GOLDEN
    x = (x ^ (x >> _SHIFTS[0])) * _MIX_1
    x = (x ^ (x >> _SHIFTS[1])) * _MIX_2
    return x ^ (x >> _SHIFTS[2])


def hash_uniform(seed: int, users: np.ndarray, items: np.ndarray) -> np.ndarray:
    """Deterministic uniform [0, 1) value per (seed, user, item)."""
    users = np.atleast_1d(np.asarray(users)).astype(np.uint64)
    items = np.atleast_1d(np.asarray(items)).astype(np.uint64)
    with np.errstate(over="ignore"):
        base = _splitmix64(np.full(1, seed % (1 << 64), dtype=np.uint64))
        h = _splitmix64(_splitmix64(base ^ users) ^ items)
    return (h >> _MANTISSA_SHIFT).astype(np.float64) * (1.0 / (1 << 53))


class RandomPlacement:
    """Uniform random ratings in [1, max_rating], reproducible per (seed, i, j)."""

    def __init__(self, seed: int, max_rating: float = 5.0):
        self.seed = seed
        self.max_rating = max_rating

    def predict_pairs(self, users: np.ndarray, items: np.ndarray) -> np.ndarray:
        return 1.0 + hash_uniform(self.seed, users, items) * (self.max_rating - 1.0)

    def predict(self, i: int, j: int) -> float:
        return float(self.predict_pairs(np.array([i]), np.array([j]))[0])

    def score_user(self, i: int, n_items: int) -> np.ndarray:
        items = np.arange(n_items)
        return self.predict_pairs(np.full(n_items, i), items)


def random_baseline(seed: int, max_rating: float = 5.0) -> RandomPlacement:
    return RandomPlacement(seed, max_rating)


# ==================== Loss and gradients ====================

def _sign(x: float) -> float:
    return 1.0 if x >= 0.0 else -1.0


def _emotion_scale(emotion_weight: float, score: float, count: float) -> float:
    """B = lambda / (score * count)."""
    if not score * count > 0:
        raise StatsError(f"Item statistics must be positive, got score={score}, count={count}")
    return emotion_weight / (score * count)


def compute_scratch(
    u: np.ndarray, v: np.ndarray, target: float, B: float, norm_floor: float
) -> GradientScratch:
    t0 = max(math.sqrt(float(u @ u)), norm_floor)
    t1 = max(math.sqrt(float(v @ v)), norm_floor)
    t2 = t0 * t1
    t3 = float(u @ v)
    return GradientScratch(t0=t0, t1=t1, t2=t2, t3=t3, B=B, residual=target - t3 / t2)


def gradient_coefficients(
    s: GradientScratch, popular: Optional[bool], cosine_floor: float
) -> tuple[float, float, float, float]:
    """Coefficients (a_uu, a_uv, a_vv, a_vu) with grad_U = a_uu*U + a_uv*V, grad_V = a_vv*V + a_vu*U.

    ``popular`` None means the emotion term is off.
    """
    two_res = 2.0 * s.residual
    # d(cos)/dU = V/t2 - t3*U/(t0^3 t1); d(cos)/dV = U/t2 - t3*V/(t0 t1^3)
    a_uu = two_res * s.t3 / (s.t0 ** 3 * s.t1)
    a_uv = -two_res / s.t2
    a_vv = two_res * s.t3 / (s.t0 * s.t1 ** 3)
    a_vu = -two_res / s.t2

    if popular is None:
        return a_uu, a_uv, a_vv, a_vu

    if popular:
        # -B * t2 / t3; constant inside the clamp zone
        if abs(s.t3) >= cosine_floor * s.t2:
            t3_sq = s.t3 * s.t3
            a_uu -= s.B * s.t1 / (s.t0 * s.t3)
            a_uv += s.B * s.t2 / t3_sq
            a_vv -= s.B * s.t0 / (s.t1 * s.t3)
            a_vu += s.B * s.t2 / t3_sq
    else:
        # -B * t3 / t2
        a_uu += s.B * s.t3 / (s.t0 ** 3 * s.t1)
        a_uv -= s.B / s.t2
        a_vv += s.B * s.t3 / (s.t0 * s.t1 ** 3)
        a_vu -= s.B / s.t2
    return a_uu, a_uv, a_vv, a_vu


def pair_loss(
    u: np.ndarray,
    v: np.ndarray,
    rating: float,
    max_rating: float,
    score: float,
    count: float,
    popular: bool,
    emotion_weight: float,
    cosine_floor: float = 1e-6,
    norm_floor: float = 1e-12,
) -> float:
    """L_ij for one observed pair."""
    s = compute_scratch(u, v, rating / max_rating, 0.0, norm_floor)
    loss = s.residual ** 2
    if emotion_weight == 0.0:
        return loss
    B = _emotion_scale(emotion_weight, score, count)
    if popular:
        t3_safe = _sign(s.t3) * max(abs(s.t3), cosine_floor * s.t2)
        return loss - B * s.t2 / t3_safe
    return loss - B * s.t3 / s.t2


def pair_gradients(
    u: np.ndarray,
    v: np.ndarray,
    rating: float,
    max_rating: float,
    score: float,
    count: float,
    popular: bool,
    emotion_weight: float,
    cosine_floor: float = 1e-6,
    norm_floor: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic (dL_ij/dU_i, dL_ij/dV_j)."""
    B = _emotion_scale(emotion_weight, score, count)
    s = compute_scratch(u, v, rating / max_rating, B, norm_floor)
    a_uu, a_uv, a_vv, a_vu = gradient_coefficients(s, popular, cosine_floor)
    if not all(math.isfinite(a) for a in (a_uu, a_uv, a_vv, a_vu)):
        branch = "popular" if popular else "obscure"
        raise GradientError(f"Non-finite gradient in the {branch} branch", branch=branch)
    return a_uu * u + a_uv * v, a_vv * v + a_vu * u


def emf_step_gradients(
    model: FactorModel, i: int, j: int, rating: float, stats: ItemStats, emotion_weight: float
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of L_ij with respect to U_i and V_j for the model's current state."""
    item_class = stats.popularity_class(j)
    if item_class is None:
        raise StatsError(f"Item index {j} is missing from the statistics or unclassified")
    return pair_gradients(
        model.U[i], model.V[j], rating, model.max_rating,
        float(stats.score[j]), float(stats.count[j]), bool(stats.popular[j]), emotion_weight,
        cosine_floor=model.config.cosine_floor, norm_floor=model.config.norm_floor,
    )


def _loss_terms(
    U: np.ndarray,
    V: np.ndarray,
    train: RatingDataset,
    max_rating: float,
    stats: Optional[ItemStats],
    config: TrainConfig,
) -> float:
    total = 0.0
    for start in range(0, len(train), LOSS_CHUNK):
        users = train.user_indices[start:start + LOSS_CHUNK]
        items = train.item_indices[start:start + LOSS_CHUNK]
        uu, vv = U[users], V[items]
        t2 = np.maximum(np.linalg.norm(uu, axis=1), config.norm_floor) * np.maximum(
            np.linalg.norm(vv, axis=1), config.norm_floor
        )
        t3 = np.einsum("ij,ij->i", uu, vv)
        loss = (train.ratings[start:start + LOSS_CHUNK] / max_rating - t3 / t2) ** 2
        if stats is not None and config.emotion_weight > 0.0:
            B = config.emotion_weight / (stats.score[items] * stats.count[items])
            t3_safe = np.where(t3 >= 0.0, 1.0, -1.0) * np.maximum(np.abs(t3), config.cosine_floor * t2)
            loss = loss - np.where(stats.popular[items], B * t2 / t3_safe, B * t3 / t2)
        total += float(loss.sum())
    return total


def total_loss(model: FactorModel, train: RatingDataset, stats: Optional[ItemStats] = None) -> float:
    """Sum of L_ij over the training triples (squared term only without stats)."""
    return _loss_terms(model.U, model.V, train, model.max_rating, stats, model.config)


# ==================== Training ====================

def _check_stats(train: RatingDataset, stats: ItemStats) -> None:
    if not stats.is_classified:
        raise StatsError("Item statistics must be classified before EMF training")
    if len(stats.count) != train.n_items:
        raise StatsError(f"Statistics cover {len(stats.count)} items, training data has {train.n_items}")
    if len(train) and not (stats.count[train.item_indices] > 0).all():
        raise StatsError("Training data contains items absent from the statistics")


def _run_sgd(train: RatingDataset, stats: Optional[ItemStats], config: TrainConfig) -> FactorModel:
    if len(train) == 0:
        raise DataValidationError("Cannot train on an empty dataset")

    initial = init_model(train.n_users, train.n_items, config, train.max_rating)
    U, V = initial.U.copy(), initial.V.copy()
    use_emotion = stats is not None and config.emotion_weight > 0.0

    users = train.user_indices.tolist()
    items = train.item_indices.tolist()
    targets = (train.ratings / train.max_rating).tolist()
    if use_emotion:
        with np.errstate(divide="ignore", invalid="ignore"):
            item_B = (config.emotion_weight / (stats.score * stats.count)).tolist()
        item_popular = stats.popular.tolist()

    shuffle_rng = np.random.default_rng(derive_seed(config.seed, "shuffle"))
    jitter_rng = np.random.default_rng(derive_seed(config.seed, "jitter"))
    jitter_scale = config.init_scale / 100.0
    lr, nf, cf = config.learning_rate, config.norm_floor, config.cosine_floor

    history = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(users)).tolist()
        for step, k in enumerate(order, start=1):
            i, j = users[k], items[k]
            u, v = U[i], V[j]
            if use_emotion:
                s = compute_scratch(u, v, targets[k], item_B[j], nf)
                a_uu, a_uv, a_vv, a_vu = gradient_coefficients(s, item_popular[j], cf)
            else:
                s = compute_scratch(u, v, targets[k], 0.0, nf)
                a_uu, a_uv, a_vv, a_vu = gradient_coefficients(s, None, cf)

            new_u = u - lr * (a_uu * u + a_uv * v)
            new_v = v - lr * (a_vv * v + a_vu * u)

            for vector, table, row in ((new_u, U, i), (new_v, V, j)):
                norm = math.sqrt(float(vector @ vector))
                if not math.isfinite(norm):
                    raise DivergenceError(
                        f"Training diverged at epoch {epoch}, step {step} "
                        f"(user index {i}, item index {j}): non-finite factors",
                        epoch=epoch, step=step,
                    )
                if norm < nf:
                    vector = jitter_scale * (1.0 - jitter_rng.random(len(vector)))
                table[row] = vector

        loss = _loss_terms(U, V, train, train.max_rating, stats if use_emotion else None, config)
        if not (math.isfinite(loss) and np.isfinite(U).all() and np.isfinite(V).all()):
            raise DivergenceError(
                f"Training diverged at epoch {epoch}, step {len(order)}: non-finite loss or factors",
                epoch=epoch, step=len(order),
            )
        history.append(loss)
        logger.info(f"epoch {epoch}/{config.epochs}: loss={loss:.6f}")

    U.setflags(write=False)
    V.setflags(write=False)
    return FactorModel(U=U, V=V, max_rating=train.max_rating, config=config, loss_history=history)


def train_mf(train: RatingDataset, config: TrainConfig) -> FactorModel:
    """Classic cosine MF: the squared term alone (lambda forced to 0)."""
    config = config.model_copy(update={"emotion_weight": 0.0})
    logger.info(f"Training MF: d={config.d}, lr={config.learning_rate}, epochs={config.epochs}, seed={config.seed}")
    return _run_sgd(train, None, config)


def train_emf(train: RatingDataset, stats: ItemStats, config: TrainConfig) -> FactorModel:
    """Emotion-based MF. With lambda = 0 this is exactly ``train_mf``."""
    _check_stats(train, stats)
    logger.info(
        f"Training EMF: d={config.d}, lr={config.learning_rate}, lambda={config.emotion_weight}, "
        f"epochs={config.epochs}, seed={config.seed}"
    )
    return _run_sgd(train, stats, config)


# ==================== Persistence ====================

def save_model(model: FactorModel, path: Path) -> Path:
    """Write the model file.

    Layout: the line ``EMFMODEL 1``, one JSON header line (d, n_users,
    n_items, max_rating, seed, config; sorted keys), then U and V as
    row-major little-endian float64.
    """
    header = {
        "d": model.d,
        "n_users": model.n_users,
        "n_items": model.n_items,
        "max_rating": model.max_rating,
        "seed": model.config.seed,
        "config": model.config.model_dump(),
    }
    payload = b"".join([
        MODEL_MAGIC, b"\n",
        json.dumps(header, sort_keys=True).encode("utf-8"), b"\n",
        np.ascontiguousarray(model.U, dtype="<f8").tobytes(),
        np.ascontiguousarray(model.V, dtype="<f8").tobytes(),
    ])
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise ArtifactIOError(f"Cannot write model {path}: {e.strerror or e}") from e
    logger.info(f"Model saved: {path}")
    return path


def load_model(path: Path) -> FactorModel:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read model {path}: {e.strerror or e}") from e

    magic, _, rest = data.partition(b"\n")
    header_line, _, body = rest.partition(b"\n")
    if magic != MODEL_MAGIC:
        raise DataValidationError(f"{path} is not a model file")
    try:
        header = json.loads(header_line)
        d, n, m = header["d"], header["n_users"], header["n_items"]
    except (ValueError, KeyError) as e:
        raise DataValidationError(f"{path}: malformed model header: {e}") from e
    if len(body) != (n + m) * d * 8:
        raise DataValidationError(f"{path}: expected {(n + m) * d * 8} payload bytes, found {len(body)}")

    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return FactorModel(
        U=values[: n * d].reshape(n, d),
        V=values[n * d:].reshape(m, d),
        max_rating=header["max_rating"],
        config=TrainConfig(**header["config"]),
    )
