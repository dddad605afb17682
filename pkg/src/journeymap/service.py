"""HTTP/JSON API backing the analyst UI.

Single-tenant, in-memory state: uploads swap an immutable dataset snapshot
atomically, and distance matrices are cached per (version, config) with LRU
eviction.  Read endpoints are pure functions of the snapshot version and
query parameters.
"""
from __future__ import annotations

import threading
from collections import OrderedDict
from fractions import Fraction
from typing import Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .clustering import kmedoids
from .counterfactual import CfQuery, find_counterfactual
from .distance import DistanceConfig, KERNELS, LEVENSHTEIN, StageWeights, distance_matrix
from .embedding import mds
from .errors import EmptyDataset, InvalidK, JourneyMapError, MalformedRow, TooFewPoints
from .ingestion import RawRecord, cleanse, cooccurrence, describe, load, validate, validate_query
from .model import Dataset, Journey
from .prediction import KnnModel

CACHE_CAPACITY = 8


class SessionState:
    """Snapshot-isolated dataset plus per-config caches."""

    def __init__(self, dataset: Optional[Dataset] = None):
        self._lock = threading.Lock()
        self._dataset = dataset
        self._version = 1 if dataset is not None else 0
        self._matrices: OrderedDict = OrderedDict()
        self._models: OrderedDict = OrderedDict()

    def snapshot(self) -> tuple[int, Optional[Dataset]]:
        with self._lock:
            return self._version, self._dataset

    def replace(self, dataset: Dataset) -> int:
        with self._lock:
            self._version += 1
            self._dataset = dataset
            return self._version

    def matrix(self, version: int, dataset: Dataset, config: DistanceConfig):
        key = (version, config.label())
        with self._lock:
            if key in self._matrices:
                self._matrices.move_to_end(key)
                return self._matrices[key]
        value = distance_matrix(dataset, config)
        with self._lock:
            if key not in self._matrices:
                self._matrices[key] = value
                while len(self._matrices) > CACHE_CAPACITY:
                    self._matrices.popitem(last=False)
            return self._matrices[key]

    def model(self, version: int, dataset: Dataset, config: DistanceConfig, k_prime: int) -> KnnModel:
        key = (version, config.label(), k_prime)
        with self._lock:
            if key in self._models:
                self._models.move_to_end(key)
                return self._models[key]
        value = KnnModel(k_prime=k_prime, config=config).fit(dataset.journeys)
        with self._lock:
            if key not in self._models:
                self._models[key] = value
                while len(self._models) > CACHE_CAPACITY:
                    self._models.popitem(last=False)
            return self._models[key]


class PredictBody(BaseModel):
    items: list[str]
    k_prime: int = 5
    w1: str = "2"
    w2: str = "1"
    kernel: str = LEVENSHTEIN


class CounterfactualBody(BaseModel):
    items: list[str]
    y_obj: int = 1
    lam: float = 1.0
    k_prime: int = 5
    w1: str = "2"
    w2: str = "1"
    kernel: str = LEVENSHTEIN


def _config(w1: str, w2: str, w3: str, kernel: str) -> DistanceConfig:
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel: {kernel!r}")
    return DistanceConfig(
        weights=StageWeights(Fraction(w1), Fraction(w2), Fraction(w3)), kernel=kernel
    )


def _validate_items(items: list[str]):
    # outcome optional: the UI predicts on in-progress drafts
    return validate_query(RawRecord(id="query", items=tuple(items)))


def create_app(initial_dataset: Optional[Dataset] = None) -> FastAPI:
    app = FastAPI(title="journeymap", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],  # localhost analyst tool, no auth by design
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = SessionState(initial_dataset)
    app.state.session = state

    def _dataset_or_404():
        version, dataset = state.snapshot()
        if dataset is None:
            return None, JSONResponse({"error": "no dataset uploaded"}, status_code=404)
        return (version, dataset), None

    @app.exception_handler(JourneyMapError)
    async def _domain_error(_request: Request, exc: JourneyMapError):
        status = 400
        if isinstance(exc, (InvalidK, TooFewPoints)):
            status = 400
        return JSONResponse({"error": str(exc)}, status_code=status)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/dataset")
    async def upload(request: Request, format: str = Query("csv")):
        body = await request.body()
        try:
            records = load(body, format=format)
        except (MalformedRow, ValueError, UnicodeDecodeError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        if not records:
            return JSONResponse({"error": "empty body"}, status_code=400)
        try:
            dataset, report = cleanse(records, provenance="upload")
        except EmptyDataset:
            rejected = [(r.id, validate(r)) for r in records]
            return JSONResponse(
                {
                    "error": "no records accepted",
                    "report": {
                        "accepted": 0,
                        "rejected": [{"id": rid, "reason": rs} for rid, rs in rejected],
                    },
                },
                status_code=422,
            )
        version = state.replace(dataset)
        return {"version": version, "report": report.to_jsonable()}

    @app.get("/api/stats")
    def stats():
        snap, err = _dataset_or_404()
        if err:
            return err
        _, dataset = snap
        return {
            "stats": describe(dataset).to_jsonable(),
            "cooccurrence": cooccurrence(dataset).to_jsonable(),
        }

    @app.get("/api/clusters")
    def clusters(
        k: int = 6,
        w1: str = "2",
        w2: str = "1",
        w3: str = "10",
        kernel: str = LEVENSHTEIN,
        seed: int = 0,
    ):
        snap, err = _dataset_or_404()
        if err:
            return err
        version, dataset = snap
        try:
            config = _config(w1, w2, w3, kernel)
        except (ValueError, ZeroDivisionError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        if not 1 <= k <= len(dataset):
            return JSONResponse({"error": f"InvalidK: k={k}"}, status_code=400)
        matrix = state.matrix(version, dataset, config)
        result = kmedoids(matrix, k, seed)
        prototypes = [
            {
                "cluster": c,
                "journey_id": dataset.journeys[m].id,
                "items": list(dataset.journeys[m].canonical_items),
                "size": result.cluster_sizes()[c],
            }
            for c, m in enumerate(result.medoid_indices)
        ]
        return {"version": version, "result": result.to_jsonable(), "prototypes": prototypes}

    @app.get("/api/embedding")
    def embedding(
        k: int = 6,
        w1: str = "2",
        w2: str = "1",
        w3: str = "10",
        kernel: str = LEVENSHTEIN,
        seed: int = 0,
    ):
        snap, err = _dataset_or_404()
        if err:
            return err
        version, dataset = snap
        try:
            config = _config(w1, w2, w3, kernel)
        except (ValueError, ZeroDivisionError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        if not 1 <= k <= len(dataset):
            return JSONResponse({"error": f"InvalidK: k={k}"}, status_code=400)
        matrix = state.matrix(version, dataset, config)
        emb = mds(matrix)
        result = kmedoids(matrix, k, seed)
        points = emb.to_jsonable()
        points["cluster"] = list(result.assignment)
        points["outcome"] = [j.outcome_label() for j in dataset.journeys]
        points["medoid_indices"] = list(result.medoid_indices)
        return {"version": version, "embedding": points}

    @app.post("/api/predict")
    def predict(body: PredictBody):
        snap, err = _dataset_or_404()
        if err:
            return err
        version, dataset = snap
        journey = _validate_items(body.items)
        if not isinstance(journey, Journey):
            return JSONResponse({"error": "invalid journey", "reason": journey}, status_code=422)
        if not 1 <= body.k_prime <= len(dataset):
            return JSONResponse({"error": f"InvalidK: k'={body.k_prime}"}, status_code=400)
        try:
            config = _config(body.w1, body.w2, "0", body.kernel)
        except (ValueError, ZeroDivisionError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        model = state.model(version, dataset, config, body.k_prime)
        neighbors = model.neighbors(journey)
        return {
            "version": version,
            "y_hat": model.predict_value(journey),
            "neighbors": [
                {"id": dataset.journeys[i].id, "distance": d, "label": lab}
                for i, d, lab in neighbors
            ],
        }

    @app.post("/api/counterfactual")
    def counterfactual(body: CounterfactualBody):
        snap, err = _dataset_or_404()
        if err:
            return err
        version, dataset = snap
        if body.lam < 0:
            return JSONResponse({"error": "lambda must be non-negative"}, status_code=400)
        if body.y_obj not in (0, 1):
            return JSONResponse({"error": "y_obj must be 0 or 1"}, status_code=400)
        journey = _validate_items(body.items)
        if not isinstance(journey, Journey):
            return JSONResponse({"error": "invalid journey", "reason": journey}, status_code=422)
        if not 1 <= body.k_prime <= len(dataset):
            return JSONResponse({"error": f"InvalidK: k'={body.k_prime}"}, status_code=400)
        try:
            config = _config(body.w1, body.w2, "0", body.kernel)
        except (ValueError, ZeroDivisionError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        model = state.model(version, dataset, config, body.k_prime)
        query = CfQuery(base=journey, y_obj=body.y_obj, lam=body.lam)
        result = find_counterfactual(dataset, model, query)
        payload = result.to_jsonable()
        warning = None
        if result.loss > 0:
            warning = "no candidate with the desired outcome exists"
        return {
            "version": version,
            "base_items": list(journey.canonical_items),
            "result": payload,
            "warning": warning,
        }

    return app
