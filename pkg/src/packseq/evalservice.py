"""HTTP service for the blinded sequence-judgment study.

Evaluators are shown packing sequences without knowing whether each one
was replayed from a real demonstration or generated (random baseline,
uncapped beam search, or the length-3 capped variant), and verdicts are
collected per session. The trial pool is built offline; the service keeps
an append-only JSON-lines event log as its only mutable state, so results
survive restarts by replaying the log.

Endpoints (all JSON):
    POST /api/sessions                    -> {"session_id": ...}
    GET  /api/sessions/{id}/next-trial    -> trial payload or exhausted marker
    POST /api/sessions/{id}/judgments     <- {"trial_id": ..., "verdict": ...}
    GET  /api/results?pair=beam_3,beam_n  -> per-source table + pair statistics
"""
import json
import os
import random
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .catalog import ObjectCatalog
from .levels import LevelTable
from .planner import SearchConfig, predict, predict_full, random_sequence
from .stats import Contingency2x2, boschloo_one_sided, cohens_h, power_two_prop

TRIAL_SOURCES = ("real", "random", "beam_n", "beam_3")
VERDICTS = ("human_generated", "computer_generated")


class UnknownSessionError(KeyError):
    pass


class UnknownTrialError(KeyError):
    pass


class DuplicateJudgmentError(ValueError):
    pass


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class Trial:
    trial_id: str
    objects: list[dict]  # {"object_id", "name", "bbox"} per scene object
    sequence: list[str]
    true_source: str  # never serialized into client payloads
    created_at: str

    def client_payload(self) -> dict:
        # Blinding: the payload must never carry the source label.
        return {
            "trial_id": self.trial_id,
            "objects": self.objects,
            "sequence": self.sequence,
            "created_at": self.created_at,
        }


@dataclass(frozen=True)
class Judgment:
    session_id: str
    trial_id: str
    verdict: str
    submitted_at: str


# ---------------------------------------------------------------------------
# Pool building (offline)
# ---------------------------------------------------------------------------

def build_pool(
    demos,
    catalog: ObjectCatalog,
    table: LevelTable,
    per_type: int,
    seed: int,
    beam_width: int = 5,
    capped_len: int = 3,
    created_at: str | None = None,
) -> list[Trial]:
    """Balanced trial pool: per_type trials of each source on dataset scenes.

    Generated plans that cannot cover their scene (flagged leftovers) are
    excluded, because a trial's sequence must pack the whole scene. Trial
    ids are opaque and assigned after shuffling so they do not leak the
    source type.
    """
    demos = list(demos)
    if not demos:
        raise ValueError("cannot build a pool from an empty dataset")
    rng = random.Random(seed)
    created = created_at if created_at is not None else _now_iso()

    candidates: dict[str, list[tuple[list[str], list[str]]]] = {s: [] for s in TRIAL_SOURCES}
    for demo in demos:
        scene = sorted(demo.object_set)
        candidates["real"].append((scene, list(demo.sequence)))
        rand_plan = random_sequence(scene, seed=rng.randrange(2**63))
        candidates["random"].append((scene, rand_plan.sequence))
        beam_plan = predict(table, scene, SearchConfig(beam_width=beam_width))
        if not beam_plan.used_fallback:
            candidates["beam_n"].append((scene, beam_plan.sequence))
        capped_plan = predict_full(
            table, scene, SearchConfig(beam_width=beam_width, max_len=capped_len)
        )
        if not capped_plan.used_fallback:
            candidates["beam_3"].append((scene, capped_plan.sequence))

    picked: list[tuple[str, list[str], list[str]]] = []
    for source in TRIAL_SOURCES:
        pool = candidates[source]
        if len(pool) < per_type:
            raise ValueError(
                f"only {len(pool)} eligible {source!r} trials; {per_type} requested"
            )
        for scene, sequence in rng.sample(pool, per_type):
            picked.append((source, scene, sequence))
    rng.shuffle(picked)

    trials = []
    for idx, (source, scene, sequence) in enumerate(picked, start=1):
        objects = [
            {
                "object_id": oid,
                "name": catalog.get(oid).display_name,
                "bbox": list(catalog.get(oid).bbox),
            }
            for oid in scene
        ]
        trials.append(
            Trial(
                trial_id=f"trial-{idx:04d}",
                objects=objects,
                sequence=sequence,
                true_source=source,
                created_at=created,
            )
        )
    return trials


def write_pool(trials, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in trials:
            rec = {
                "trial_id": t.trial_id,
                "objects": t.objects,
                "sequence": t.sequence,
                "true_source": t.true_source,
                "created_at": t.created_at,
            }
            fh.write(json.dumps(rec) + "\n")


def load_pool(path) -> list[Trial]:
    trials = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            trials.append(
                Trial(
                    trial_id=rec["trial_id"],
                    objects=rec["objects"],
                    sequence=rec["sequence"],
                    true_source=rec["true_source"],
                    created_at=rec["created_at"],
                )
            )
    return trials


# ---------------------------------------------------------------------------
# Service state
# ---------------------------------------------------------------------------

@dataclass
class ResultsRow:
    source: str
    n: int
    judged_human: int
    judged_computer: int

    def as_dict(self) -> dict:
        row = {
            "source": self.source,
            "n": self.n,
            "judged_human": self.judged_human,
            "judged_computer": self.judged_computer,
            "judged_human_pct": None,
            "judged_computer_pct": None,
        }
        if self.n > 0:
            row["judged_human_pct"] = round(100.0 * self.judged_human / self.n)
            row["judged_computer_pct"] = round(100.0 * self.judged_computer / self.n)
        return row


class EvaluationState:
    """Trial assignment, judgment log, and aggregation.

    Thread-safe: a single lock serializes writes; the log file is appended
    and fsynced before a judgment is acknowledged.
    """

    def __init__(self, trials: list[Trial], log_path, seed: int = 0):
        if len({t.trial_id for t in trials}) != len(trials):
            raise ValueError("duplicate trial ids in pool")
        self._trials = {t.trial_id: t for t in trials}
        self._log_path = log_path
        self._seed = seed
        self._lock = threading.Lock()
        self._sessions: set[str] = set()
        self._judgments: list[Judgment] = []
        self._judged: dict[str, set[str]] = {}  # session -> judged trial ids
        self._replay()

    # -- persistence --------------------------------------------------------

    def _replay(self) -> None:
        if not os.path.exists(self._log_path):
            return
        with open(self._log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if rec["kind"] == "session":
                    self._sessions.add(rec["session_id"])
                elif rec["kind"] == "judgment":
                    j = Judgment(
                        rec["session_id"], rec["trial_id"], rec["verdict"], rec["submitted_at"]
                    )
                    self._judgments.append(j)
                    self._judged.setdefault(j.session_id, set()).add(j.trial_id)

    def _append(self, rec: dict) -> None:
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- operations ---------------------------------------------------------

    def create_session(self) -> str:
        session_id = uuid.uuid4().hex
        with self._lock:
            self._sessions.add(session_id)
            self._append({"kind": "session", "session_id": session_id, "created_at": _now_iso()})
        return session_id

    def next_trial(self, session_id: str) -> Trial | None:
        """Pick an unjudged trial, rotating source types for balance.

        Deterministic given (service seed, session, judgments so far), so a
        repeated call without an intervening judgment returns the same
        trial.
        """
        with self._lock:
            if session_id not in self._sessions:
                raise UnknownSessionError(session_id)
            judged = self._judged.get(session_id, set())
            open_by_source: dict[str, list[Trial]] = {s: [] for s in TRIAL_SOURCES}
            for t in sorted(self._trials.values(), key=lambda t: t.trial_id):
                if t.trial_id not in judged:
                    open_by_source[t.true_source].append(t)
            start = len(judged) % len(TRIAL_SOURCES)
            rng = random.Random(f"{self._seed}:{session_id}:{len(judged)}")
            for offset in range(len(TRIAL_SOURCES)):
                source = TRIAL_SOURCES[(start + offset) % len(TRIAL_SOURCES)]
                if open_by_source[source]:
                    return rng.choice(open_by_source[source])
            return None

    def submit_judgment(self, session_id: str, trial_id: str, verdict: str) -> Judgment:
        if verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")
        with self._lock:
            if session_id not in self._sessions:
                raise UnknownSessionError(session_id)
            if trial_id not in self._trials:
                raise UnknownTrialError(trial_id)
            if trial_id in self._judged.get(session_id, set()):
                raise DuplicateJudgmentError(f"{session_id} already judged {trial_id}")
            judgment = Judgment(session_id, trial_id, verdict, _now_iso())
            self._append(
                {
                    "kind": "judgment",
                    "session_id": session_id,
                    "trial_id": trial_id,
                    "verdict": verdict,
                    "submitted_at": judgment.submitted_at,
                }
            )
            self._judgments.append(judgment)
            self._judged.setdefault(session_id, set()).add(trial_id)
        return judgment

    def results(self, pair: tuple[str, str] | None = None, grid_size: int = 2000) -> dict:
        """Aggregate judgments per source; optionally test one source pair.

        The pair statistics treat "judged human" as success and test
        whether the first source's proportion exceeds the second's.
        """
        with self._lock:
            judgments = list(self._judgments)
        counts = {s: {"human_generated": 0, "computer_generated": 0} for s in TRIAL_SOURCES}
        for j in judgments:
            source = self._trials[j.trial_id].true_source
            counts[source][j.verdict] += 1
        rows = {}
        for source in TRIAL_SOURCES:
            human = counts[source]["human_generated"]
            computer = counts[source]["computer_generated"]
            rows[source] = ResultsRow(source, human + computer, human, computer).as_dict()
        out = {"rows": rows, "total_judgments": len(judgments)}
        if pair is not None:
            out["pair"] = self._pair_stats(pair, rows, grid_size)
        return out

    def _pair_stats(self, pair: tuple[str, str], rows: dict, grid_size: int) -> dict:
        a, b = pair
        for source in (a, b):
            if source not in TRIAL_SOURCES:
                raise ValueError(f"unknown source type: {source!r}")
        ra, rb = rows[a], rows[b]
        block: dict = {"sources": [a, b]}
        if ra["n"] == 0 or rb["n"] == 0:
            block["available"] = False
            block["reason"] = "both sources need at least one judgment"
            return block
        t = Contingency2x2(
            s1=ra["judged_human"], f1=ra["judged_computer"],
            s2=rb["judged_human"], f2=rb["judged_computer"],
        )
        h = cohens_h(t.p1, t.p2)
        power = None
        if t.n1 >= 2 and t.n2 >= 2:  # the power approximation needs n >= 2
            power = power_two_prop(h, t.n1, t.n2, alpha=0.05, one_tailed=True)
        block.update(
            {
                "available": True,
                "counts": {"s1": t.s1, "f1": t.f1, "s2": t.s2, "f2": t.f2},
                "boschloo_p": boschloo_one_sided(t, grid_size=grid_size).p_value,
                "cohens_h": h,
                "power": power,
            }
        )
        return block

    @property
    def pool_size(self) -> int:
        return len(self._trials)


# ---------------------------------------------------------------------------
# FastAPI wiring
# ---------------------------------------------------------------------------

def create_app(pool_path, log_path, seed: int = 0, ui_dir=None):
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware
    from pydantic import BaseModel

    state = EvaluationState(load_pool(pool_path), log_path, seed=seed)
    app = FastAPI(title="packing-sequence judgment service")
    app.state.evaluation = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    class JudgmentBody(BaseModel):
        trial_id: str
        verdict: str

    @app.post("/api/sessions")
    def create_session():
        return {"session_id": state.create_session()}

    @app.get("/api/sessions/{session_id}/next-trial")
    def next_trial(session_id: str):
        try:
            trial = state.next_trial(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        if trial is None:
            return {"status": "exhausted"}
        return {"status": "trial", "trial": trial.client_payload()}

    @app.post("/api/sessions/{session_id}/judgments")
    def submit_judgment(session_id: str, body: JudgmentBody):
        try:
            state.submit_judgment(session_id, body.trial_id, body.verdict)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        except UnknownTrialError:
            raise HTTPException(status_code=404, detail="unknown trial")
        except DuplicateJudgmentError:
            raise HTTPException(status_code=409, detail="already judged")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"status": "recorded"}

    @app.get("/api/results")
    def results(pair: str | None = None):
        parsed = None
        if pair:
            parts = pair.split(",")
            if len(parts) != 2:
                raise HTTPException(status_code=422, detail="pair must be 'typeA,typeB'")
            parsed = (parts[0].strip(), parts[1].strip())
        try:
            return state.results(pair=parsed)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
