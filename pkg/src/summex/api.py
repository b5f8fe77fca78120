"""HTTP JSON API over sessions, steps, suggestions and catalog browsing.

Catalogs, scales and checkpoints are loaded at startup; sessions are
in-memory and per-session step application is serialized. Every response
carries the session's step_index so clients can detect staleness, and POSTed
steps echo a sequence number that must match it.
"""

import threading
from dataclasses import dataclass, field

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from .catalog import PatternCatalog, load_catalog
from .engine import (
    NoValidActionError,
    Session,
    SessionConfig,
    SessionExhaustedError,
    StaleStepError,
    apply_step,
    build_step,
    cumulated_utility,
    run_full_pipeline,
    suggest_actions,
)
from .ingest import BinnedDataset
from .metrics import ComponentScales, UtilityWeights, load_scales, uniformity_from_sd_sum
from .operators import InvalidActionError, action_from_json, action_is_valid, Action


@dataclass
class DatasetEntry:
    id: str
    data: BinnedDataset
    catalog: PatternCatalog
    scales: ComponentScales
    checkpoint_path: str | None = None


@dataclass
class AppState:
    datasets: dict = field(default_factory=dict)
    sessions: dict = field(default_factory=dict)
    locks: dict = field(default_factory=dict)
    session_datasets: dict = field(default_factory=dict)


def _error(status: int, code: str, detail: str, fld: str | None = None) -> JSONResponse:
    body = {"error": code, "detail": detail}
    if fld:
        body["field"] = fld
    return JSONResponse(status_code=status, content=body)


def _itemset_card(entry: DatasetEntry, iid: int, with_validity: bool = True) -> dict:
    catalog = entry.catalog
    it = catalog.itemset(iid)
    description = {}
    for a, v in it.desc:
        spec = entry.data.attributes[a]
        description[catalog.attribute_names[a]] = spec.bin_label(v)
    card = {
        "id": it.id,
        "description": description,
        "bins": {catalog.attribute_names[a]: v for a, v in it.desc},
        "size": it.size,
        "uniformity": uniformity_from_sd_sum(it.sd_sum, catalog.n_attrs),
        "vector": [float(x) for x in it.vector],
        "is_root": it.id == catalog.root_id,
    }
    if with_validity:
        constrained = dict(it.desc)
        card["valid_operators"] = {
            "by-facet": [
                catalog.attribute_names[a]
                for a in range(catalog.n_attrs)
                if a not in constrained and action_is_valid(catalog, Action(iid, "by-facet", a))
            ],
            "by-superset": action_is_valid(catalog, Action(iid, "by-superset")),
            "by-distrib": action_is_valid(catalog, Action(iid, "by-distrib")),
            "by-neighbors": [
                catalog.attribute_names[a]
                for a in sorted(constrained)
                if action_is_valid(catalog, Action(iid, "by-neighbors", a))
            ],
        }
    return card


def _breakdown_json(b) -> dict:
    return {
        "raw": {"uniformity": b.uni_raw, "diversity": b.div_raw, "novelty": b.nov_raw},
        "scaled": {"uniformity": b.uni_scaled, "diversity": b.div_scaled, "novelty": b.nov_scaled},
        "utility": b.utility,
        "weights": {"alpha": b.weights[0], "beta": b.weights[1], "gamma": b.weights[2]},
    }


def _session_view(state: AppState, session: Session) -> dict:
    entry = state.datasets[state.session_datasets[session.id]]
    return {
        "id": session.id,
        "dataset": entry.id,
        "mode": session.config.mode,
        "strategy": session.config.strategy,
        "k": session.config.k,
        "t": session.config.t_total,
        "step_index": session.step_index,
        "seen": len(session.seen),
        "done": session.done,
        "truncated": session.truncated,
        "weights": list(session.next_weights()),
        "current": [_itemset_card(entry, iid) for iid in session.current],
        "breakdown": _breakdown_json(session.timeline[-1].breakdown),
        "cumulated_utility": cumulated_utility(session),
    }


def _pipeline_view(session: Session, catalog: PatternCatalog) -> dict:
    steps = []
    running = 0.0
    for i, entry in enumerate(session.timeline):
        running += entry.breakdown.utility
        record = {
            "step": i,
            "action": None if i == 0 else session.history[i - 1].action.to_json(catalog),
            "result": entry.ids,
            "seen": entry.seen_size_after,
            "cum_utility": running,
        }
        record.update(_breakdown_json(entry.breakdown))
        steps.append(record)
    return {
        "t": session.config.t_total,
        "step_index": session.step_index,
        "truncated": session.truncated,
        "steps": steps,
    }


def create_app(datasets: list, ui_dir=None) -> FastAPI:
    from fastapi.middleware.cors import CORSMiddleware

    state = AppState()
    for entry in datasets:
        state.datasets[entry.id] = entry

    app = FastAPI(title="summex")
    app.state.summex = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.get("/datasets")
    def list_datasets():
        return {
            "datasets": [
                {
                    "id": e.id,
                    "rows": e.catalog.n_rows,
                    "attributes": e.catalog.attribute_names,
                    "itemsets": len(e.catalog),
                    "bin_count": e.catalog.bin_count,
                    "min_support": e.catalog.min_support,
                    "has_checkpoint": e.checkpoint_path is not None,
                }
                for e in state.datasets.values()
            ]
        }

    @app.get("/datasets/{dataset_id}/itemsets/{iid}")
    def get_itemset(dataset_id: str, iid: int):
        entry = state.datasets.get(dataset_id)
        if entry is None:
            return _error(404, "unknown_dataset", f"no dataset {dataset_id!r}", "dataset")
        if not 0 <= iid < len(entry.catalog):
            return _error(404, "unknown_itemset", f"no itemset {iid}", "itemset")
        return _itemset_card(entry, iid)

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        dataset_id = body.get("dataset")
        entry = state.datasets.get(dataset_id)
        if entry is None:
            return _error(404, "unknown_dataset", f"no dataset {dataset_id!r}", "dataset")
        weights_cfg = body.get("weights") or {}
        try:
            weights = UtilityWeights(
                scheme=weights_cfg.get("scheme", "fixed"),
                preset=weights_cfg.get("preset", "BL"),
            )
            config = SessionConfig(
                mode=body.get("mode", "manual"),
                strategy=body.get("strategy", "top1sum"),
                weights=weights,
                k=int(body.get("k", 10)),
                t_total=int(body.get("t", 50)),
                swap_threshold=float(body.get("swap_threshold", 2.0)),
                operators=body.get("operators", "all"),
                seed=int(body.get("seed", 0)),
                checkpoint_path=entry.checkpoint_path if body.get("strategy") == "rlsum" else None,
            )
        except Exception as exc:
            field_name = _config_field(str(exc))
            return _error(400, "invalid_config", str(exc), field_name)
        try:
            session = Session(entry.catalog, config, entry.scales)
        except Exception as exc:
            return _error(400, "session_failed", str(exc))
        state.sessions[session.id] = session
        state.locks[session.id] = threading.Lock()
        state.session_datasets[session.id] = entry.id
        if config.mode == "full":
            run_full_pipeline(session)
        view = _session_view(state, session)
        view["bootstrap"] = {
            "result": session.timeline[0].ids,
            **_breakdown_json(session.timeline[0].breakdown),
        }
        if config.mode == "full":
            view["pipeline"] = _pipeline_view(session, entry.catalog)
        return view

    def _get_session(session_id: str):
        session = state.sessions.get(session_id)
        if session is None:
            return None, _error(404, "unknown_session", f"no session {session_id!r}", "session")
        return session, None

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session, err = _get_session(session_id)
        if err:
            return err
        return _session_view(state, session)

    @app.post("/sessions/{session_id}/steps")
    def post_step(session_id: str, body: dict = Body(...)):
        session, err = _get_session(session_id)
        if err:
            return err
        entry = state.datasets[state.session_datasets[session_id]]
        action_json = body.get("action") or {}
        with state.locks[session_id]:
            seq = body.get("seq")
            if seq is not None and int(seq) != session.step_index:
                return _error(
                    409,
                    "stale_sequence",
                    f"request carries seq {seq}, session is at step {session.step_index}",
                    "seq",
                )
            if session.done:
                return _error(409, "session_done", "pipeline reached its configured length")
            try:
                action = action_from_json(action_json, entry.catalog)
                step = build_step(session, action)
                apply_step(session, step)
            except InvalidActionError as exc:
                return _error(400, "invalid_action", exc.precondition, "action")
            except (StaleStepError, SessionExhaustedError) as exc:
                return _error(409, "stale_step", str(exc))
            except (KeyError, ValueError) as exc:
                return _error(400, "invalid_action", str(exc), "action")
        view = _session_view(state, session)
        view["step"] = {
            "action": step.action.to_json(entry.catalog),
            "result": list(step.result),
            **_breakdown_json(step.breakdown),
            "wall_ms": step.wall_time * 1000.0,
        }
        return view

    @app.get("/sessions/{session_id}/suggestions")
    def get_suggestions(
        session_id: str,
        operator: str | None = None,
        itemset: int | None = None,
        attribute: str | None = None,
        n: int = 5,
    ):
        session, err = _get_session(session_id)
        if err:
            return err
        entry = state.datasets[state.session_datasets[session_id]]
        constraints = {"operator": operator, "itemset": itemset, "attribute": attribute}
        try:
            ranked = suggest_actions(session, constraints, n=n)
        except NoValidActionError as exc:
            return _error(400, "no_candidates", str(exc))
        except ValueError as exc:
            return _error(400, "invalid_constraint", str(exc))
        return {
            "step_index": session.step_index,
            "suggestions": [
                {"action": a.to_json(entry.catalog), "score": score} for a, score in ranked
            ],
        }

    @app.get("/sessions/{session_id}/pipeline")
    def get_pipeline(session_id: str):
        session, err = _get_session(session_id)
        if err:
            return err
        entry = state.datasets[state.session_datasets[session_id]]
        view = _pipeline_view(session, entry.catalog)
        view["session"] = session_id
        return view

    return app


def _config_field(message: str) -> str | None:
    for name in ("mode", "strategy", "preset", "scheme", "operators", "k", "t"):
        if name in message:
            return name
    return None


def load_dataset_entry(spec: str) -> DatasetEntry:
    """Parse ``id:input:catalog[:scales[:checkpoint]]`` into a loaded entry."""
    from .cli import _load_input

    parts = spec.split(":")
    if len(parts) < 3:
        raise ValueError(f"dataset spec needs id:input:catalog, got {spec!r}")
    dataset_id, input_path, catalog_path = parts[0], parts[1], parts[2]
    data = _load_input(input_path, 10)
    catalog = load_catalog(catalog_path, data)
    scales = load_scales(parts[3]) if len(parts) > 3 and parts[3] else ComponentScales.disabled()
    checkpoint = parts[4] if len(parts) > 4 and parts[4] else None
    return DatasetEntry(
        id=dataset_id, data=data, catalog=catalog, scales=scales, checkpoint_path=checkpoint
    )


def build_app_from_config(config: dict, cli_datasets=None, ui_dir=None) -> FastAPI:
    specs = list(config.get("serve.datasets", []))
    if cli_datasets:
        specs.extend(cli_datasets)
    if not specs:
        raise ValueError("no datasets configured; pass --dataset or serve.datasets[] entries")
    ui_dir = ui_dir or config.get("serve.ui")
    return create_app([load_dataset_entry(s) for s in specs], ui_dir=ui_dir)
