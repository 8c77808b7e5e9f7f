"""
BreastMNIST archive adapter (MedMNIST .npz): loading and opt-in download
"""

import zipfile
from pathlib import Path
from typing import Optional, Union

import httpx
import numpy as np
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..config import get_settings
from ..models.schemas import Dataset
from ..payloads.presets import BREASTMNIST_SHAPE
from ..utils.errors import DatasetUnavailableError, ParseError
from ..utils.logging import get_logger

logger = get_logger(__name__)

ARCHIVE_NAME = "breastmnist.npz"
_ZIP_MAGIC = b"PK"


def default_path() -> Path:
    return get_settings().data_dir / ARCHIVE_NAME


def _labels(raw: np.ndarray) -> np.ndarray:
    return np.asarray(raw).reshape(-1).astype(np.int64)


def load_archive(path: Optional[Union[str, Path]] = None) -> Dataset:
    """
    28×28 images flattened to 784 features in [0, 1]

    The training part is train_*; the test part is val_* when present
    (546/78), else test_*.

    Raises:
        DatasetUnavailableError: archive missing
        ParseError: not a zip container, or required arrays absent
    """

    path = Path(path) if path is not None else default_path()
    if not path.exists():
        raise DatasetUnavailableError(f"BreastMNIST archive not found at {path}", path=str(path))

    with path.open("rb") as handle:
        head = handle.read(2)
    if head != _ZIP_MAGIC:
        raise ParseError(f"{path.name} is not an npz archive (bad magic {head!r})", offset=0)

    try:
        with np.load(path) as archive:
            keys = set(archive.files)
            test_key = "val" if {"val_images", "val_labels"} <= keys else "test"
            required = {"train_images", "train_labels", f"{test_key}_images", f"{test_key}_labels"}
            missing = sorted(required - keys)
            if missing:
                raise ParseError(f"archive lacks arrays {missing}", offset=None)
            train_x, train_y = archive["train_images"], archive["train_labels"]
            test_x, test_y = archive[f"{test_key}_images"], archive[f"{test_key}_labels"]
    except (zipfile.BadZipFile, ValueError, OSError) as e:
        raise ParseError(f"malformed archive {path.name}: {e}", offset=None)

    pixels = int(np.prod(BREASTMNIST_SHAPE))
    features = np.concatenate([train_x.reshape(len(train_x), pixels), test_x.reshape(len(test_x), pixels)])
    features = features.astype(np.float64) / 255.0
    labels = np.concatenate([_labels(train_y), _labels(test_y)])

    n_train, n_test = len(train_x), len(test_x)
    logger.info(f"Loaded BreastMNIST {n_train}/{n_test} ({test_key} partition as test)")
    return Dataset(
        features=features,
        labels=labels,
        name="breastmnist",
        seed=0,
        n_train=n_train,
        n_test=n_test,
        test_idx=list(range(n_train, n_train + n_test)),
    )


@retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=1, min=4, max=10),
    retry=retry_if_exception_type((httpx.RequestError, httpx.HTTPStatusError)),
    reraise=True,
)
def _download(url: str, dest: Path, timeout: float) -> None:
    with httpx.Client(timeout=timeout, follow_redirects=True) as client:
        with client.stream("GET", url) as response:
            response.raise_for_status()
            with dest.open("wb") as out:
                for chunk in response.iter_bytes():
                    out.write(chunk)


def fetch_archive(dest: Optional[Union[str, Path]] = None, url: Optional[str] = None) -> Path:
    """Download the archive (explicit opt-in only); returns its path"""

    settings = get_settings()
    dest = Path(dest) if dest is not None else default_path()
    url = url or settings.breastmnist_url
    dest.parent.mkdir(parents=True, exist_ok=True)
    partial = dest.with_suffix(".part")

    logger.info(f"Fetching BreastMNIST from {url}")
    try:
        _download(url, partial, settings.http_timeout)
    except (httpx.RequestError, httpx.HTTPStatusError) as e:
        partial.unlink(missing_ok=True)
        raise DatasetUnavailableError(f"BreastMNIST download failed: {e}", path=str(dest))
    partial.replace(dest)
    return dest
