"""Ingest - parse rating logs into validated triple stores and split them."""
import re
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from emotion_core.exceptions import ArtifactIOError, ConfigError, DataValidationError, ParseError
from emotion_core.logging_config import get_logger
from emotion_core.models.dataset import CatalogEntry, ColumnSpec, ItemCatalog, RatingDataset, SplitSpec

logger = get_logger("ingest")

MOVIELENS_MAX_RATING = 5.0
MOVIELENS_SEPARATOR = "::"
CATALOG_COLUMNS = ["item_id", "title", "year", "genres"]

# "Toy Story (1995)" -> ("Toy Story", "1995")
_TITLE_YEAR = re.compile(r"^(?P<title>.*?)\s*\((?P<year>\d{4})\)\s*$")


def _read_text(path: Path) -> str:
    """Read a text file, falling back to a Western encoding with replacement."""
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e.strerror or e}") from e
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        logger.debug(f"{path} is not UTF-8, decoding as cp1252")
        return data.decode("cp1252", errors="replace")


def _iter_lines(text: str):
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line.strip():
            yield line_no, line


def build_dataset(
    user_ext: Sequence[int],
    item_ext: Sequence[int],
    ratings: Sequence[float],
    max_rating: float,
    positions: Optional[Sequence[int]] = None,
    position_label: str = "line",
) -> RatingDataset:
    """Validate raw triples and assign dense indices in ascending external id order.

    Duplicate (user, item) pairs keep the last occurrence. Triples are stored
    sorted by (user_index, item_index).
    """
    users = np.asarray(user_ext, dtype=np.int64)
    items = np.asarray(item_ext, dtype=np.int64)
    values = np.asarray(ratings, dtype=np.float64)

    bad = ~(np.isfinite(values) & (values > 0) & (values <= max_rating))
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        where = positions[k] if positions is not None else k + 1
        raise DataValidationError(
            f"{position_label} {where}: rating {values[k]!r} outside (0, {max_rating}]",
            {position_label: where, "rating": float(values[k])},
        )

    user_ids, u_idx = np.unique(users, return_inverse=True)
    item_ids, i_idx = np.unique(items, return_inverse=True)
    u_idx = u_idx.astype(np.int64).reshape(-1)
    i_idx = i_idx.astype(np.int64).reshape(-1)

    # Keep-last: first hit in the reversed key array is the last occurrence
    keys = u_idx * max(len(item_ids), 1) + i_idx
    n = len(keys)
    _, first_in_reversed = np.unique(keys[::-1], return_index=True)
    keep = (n - 1 - first_in_reversed).astype(np.int64)
    duplicates = n - len(keep)
    if duplicates:
        logger.warning(f"Dropped {duplicates} duplicate (user, item) ratings, keeping the last occurrence")

    return RatingDataset(
        user_ids=user_ids.tolist(),
        item_ids=item_ids.tolist(),
        user_indices=u_idx[keep],
        item_indices=i_idx[keep],
        ratings=values[keep],
        max_rating=max_rating,
        duplicate_count=duplicates,
    )


def parse_movielens(
    ratings_path: Path, movies_path: Optional[Path] = None
) -> tuple[RatingDataset, ItemCatalog]:
    """Parse MovieLens ``.dat`` files (``UserID::MovieID::Rating::Timestamp``).

    Timestamps are discarded. The optional movies file supplies titles,
    years and pipe-separated genres for the catalog.
    """
    users, items, ratings, lines = [], [], [], []
    for line_no, line in _iter_lines(_read_text(ratings_path)):
        fields = line.split(MOVIELENS_SEPARATOR)
        if len(fields) != 4:
            raise ParseError(
                f"{ratings_path}: line {line_no}: expected 4 '::'-separated fields, got {len(fields)}",
                line=line_no,
            )
        try:
            users.append(int(fields[0]))
            items.append(int(fields[1]))
            ratings.append(float(fields[2]))
        except ValueError:
            raise ParseError(f"{ratings_path}: line {line_no}: malformed field in {line!r}", line=line_no)
        lines.append(line_no)

    dataset = build_dataset(users, items, ratings, MOVIELENS_MAX_RATING, positions=lines)
    logger.info(
        f"Parsed {len(dataset)} ratings from {ratings_path} "
        f"({dataset.n_users} users, {dataset.n_items} items)"
    )

    catalog = parse_movielens_movies(movies_path, dataset) if movies_path else ItemCatalog()
    return dataset, catalog


def parse_movielens_movies(movies_path: Path, dataset: RatingDataset) -> ItemCatalog:
    """Parse ``MovieID::Title::Genres`` lines for items present in the dataset."""
    index_of = {item_id: k for k, item_id in enumerate(dataset.item_ids)}
    entries: dict[int, CatalogEntry] = {}
    for line_no, line in _iter_lines(_read_text(movies_path)):
        fields = line.split(MOVIELENS_SEPARATOR)
        if len(fields) != 3:
            raise ParseError(
                f"{movies_path}: line {line_no}: expected 3 '::'-separated fields, got {len(fields)}",
                line=line_no,
            )
        try:
            item_id = int(fields[0])
        except ValueError:
            raise ParseError(f"{movies_path}: line {line_no}: malformed movie id {fields[0]!r}", line=line_no)
        if item_id not in index_of:
            continue
        title, year = _split_title_year(fields[1])
        genres = [g for g in fields[2].split("|") if g]
        entries[index_of[item_id]] = CatalogEntry(item_id=item_id, title=title, year=year, genres=genres)

    logger.info(f"Catalog: {len(entries)} of {dataset.n_items} items described by {movies_path}")
    return ItemCatalog(entries=entries)


def _split_title_year(raw_title: str) -> tuple[str, Optional[int]]:
    match = _TITLE_YEAR.match(raw_title)
    if not match:
        return raw_title.strip(), None
    return match.group("title"), int(match.group("year"))


def read_delimited(path: Path, delimiter: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, sep=delimiter, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as e:
        raise ArtifactIOError(f"Cannot read {path}: file not found") from e
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e.strerror or e}") from e
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{path}: file has no header row", line=1) from e
    except pd.errors.ParserError as e:
        raise ParseError(f"{path}: {e}") from e


def _numeric_column(frame: pd.DataFrame, column: str, path: Path, integral: bool) -> np.ndarray:
    """Convert a text column, naming the first bad data row (1-based, header excluded)."""
    values = pd.to_numeric(frame[column].str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if integral:
        bad |= np.isfinite(values) & (np.floor(values) != values)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        row = k + 1
        kind = "integer id" if integral else "numeric rating"
        raise ParseError(
            f"{path}: row {row}: expected {kind} in column {column!r}, got {frame[column].iloc[k]!r}",
            line=row,
            details={"row": row, "column": column},
        )
    return values.astype(np.int64) if integral else values


def parse_csv_ratings(path: Path, column_spec: Optional[ColumnSpec] = None) -> RatingDataset:
    """Parse a delimited rating file with a header row.

    Only the user, item and rating columns named by ``column_spec`` are read;
    every other (contextual) column is ignored.
    """
    spec = column_spec or ColumnSpec()
    frame = read_delimited(path, spec.delimiter)
    frame.columns = [str(c).strip() for c in frame.columns]

    missing = [c for c in (spec.user_col, spec.item_col, spec.rating_col) if c not in frame.columns]
    if missing:
        raise ConfigError(
            f"{path}: missing column(s) {missing}; available: {list(frame.columns)}",
            {"missing": missing},
        )

    users = _numeric_column(frame, spec.user_col, path, integral=True)
    items = _numeric_column(frame, spec.item_col, path, integral=True)
    ratings = _numeric_column(frame, spec.rating_col, path, integral=False)

    dataset = build_dataset(
        users, items, ratings, spec.max_rating,
        positions=list(range(1, len(frame) + 1)), position_label="row",
    )
    logger.info(
        f"Parsed {len(dataset)} ratings from {path} "
        f"({dataset.n_users} users, {dataset.n_items} items)"
    )
    return dataset


def parse_triples(path: Path, max_rating: float = MOVIELENS_MAX_RATING) -> RatingDataset:
    """Re-read a canonical ``user_id,item_id,rating`` export."""
    return parse_csv_ratings(path, ColumnSpec(max_rating=max_rating))


def split(dataset: RatingDataset, spec: SplitSpec) -> tuple[RatingDataset, RatingDataset]:
    """Partition triples into train and test with a seeded permutation.

    Exactly ``round(n * test_fraction)`` triples (at least 1 and at most
    n - 1 when n >= 2) go to test. Both halves keep the parent id maps and
    the parent's triple order.
    """
    if not 0.0 < spec.test_fraction < 1.0:
        raise ConfigError(f"test_fraction must be in (0, 1), got {spec.test_fraction}")
    n = len(dataset)
    if n == 0:
        raise DataValidationError("Cannot split an empty dataset")

    n_test = int(round(n * spec.test_fraction))
    if n >= 2:
        n_test = min(max(n_test, 1), n - 1)

    rng = np.random.default_rng(spec.seed)
    test_mask = np.zeros(n, dtype=bool)
    test_mask[rng.permutation(n)[:n_test]] = True

    train, test = dataset.subset(~test_mask), dataset.subset(test_mask)
    logger.info(f"Split {n} triples into {len(train)} train / {len(test)} test (seed={spec.seed})")
    return train, test


def export_triples(dataset: RatingDataset, path: Path) -> Path:
    """Write the canonical ``user_id,item_id,rating`` CSV (LF line endings)."""
    users = np.asarray(dataset.user_ids, dtype=np.int64)
    items = np.asarray(dataset.item_ids, dtype=np.int64)
    frame = pd.DataFrame({
        "user_id": users[dataset.user_indices],
        "item_id": items[dataset.item_indices],
        "rating": dataset.ratings,
    })
    return write_frame(frame, path)


def export_catalog(catalog: ItemCatalog, path: Path) -> Path:
    rows = [
        {
            "item_id": entry.item_id,
            "title": entry.title,
            "year": "" if entry.year is None else entry.year,
            "genres": "|".join(entry.genres),
        }
        for _, entry in sorted(catalog.entries.items())
    ]
    return write_frame(pd.DataFrame(rows, columns=CATALOG_COLUMNS), path)


def load_catalog(path: Path, dataset: RatingDataset) -> ItemCatalog:
    """Read an exported catalog CSV, keeping items present in the dataset."""
    frame = read_delimited(path, ",")
    missing = [c for c in CATALOG_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"{path}: missing catalog column(s) {missing}")

    index_of = {item_id: k for k, item_id in enumerate(dataset.item_ids)}
    entries: dict[int, CatalogEntry] = {}
    for row in frame.itertuples(index=False):
        item_id = int(row.item_id)
        if item_id not in index_of:
            continue
        entries[index_of[item_id]] = CatalogEntry(
            item_id=item_id,
            title=row.title,
            year=int(row.year) if row.year else None,
            genres=[g for g in row.genres.split("|") if g],
        )
    return ItemCatalog(entries=entries)


def write_frame(frame: pd.DataFrame, path: Path) -> Path:
    """Write a CSV export with header and LF line endings."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write {path}: {e.strerror or e}") from e
    return path
