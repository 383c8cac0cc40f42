"""Engine: wires backends, indices, and the four pipelines together.

The service layer and the CLI both sit on top of this object; it owns no
session state (the service's session store does) and loads indices lazily.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from ace.config import EngineConfig
from ace.corpus.index import HybridIndex, QuizIndex, load_index, save_index
from ace.corpus.ingest import ingest_corpus, load_manifest
from ace.errors import InputError
from ace.gateway.http import HttpBackend
from ace.gateway.mock import MockBackend
from ace.prompts import PromptPack
from ace.qa import QaPipeline
from ace.quiz.generate import QuizGenerator
from ace.quiz.items import parse_bloom
from ace.quiz.session import QuizEngine
from ace.retrieval import MmrParams
from ace.router import Router
from ace.tutor.session import TutorEngine

log = logging.getLogger(__name__)


class Engine:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.prompts = PromptPack(config.prompts_dir)
        if config.use_mock or config.generator is None:
            kwargs = {"dim": config.mock.dim}
            if config.mock.fallback_template:
                kwargs["fallback_template"] = config.mock.fallback_template
            script = self._load_mock_script()
            if script is not None:
                mock = MockBackend.from_script_data(script, **kwargs)
            else:
                mock = MockBackend(**kwargs)
            self.generator_backend = mock
            self.validator_backend = mock
            log.info("engine running on the deterministic mock backend")
        else:
            self.generator_backend = HttpBackend(config.generator)
            self.validator_backend = HttpBackend(config.validator or config.generator)
        self._hybrid: HybridIndex | None = None
        self._quiz: QuizIndex | None = None
        self._qa: QaPipeline | None = None
        self._quiz_engine: QuizEngine | None = None
        self._sandbox_semaphore = threading.BoundedSemaphore(config.tutor.sandbox_pool_size)
        self.router = Router(self.validator_backend, self.prompts)
        self.tutor = TutorEngine(
            self.generator_backend,
            self.validator_backend,
            self.prompts,
            language=config.tutor.language,
            max_steps=config.tutor.max_steps,
            sandbox_timeout=config.tutor.sandbox_timeout,
            sandbox_memory_mib=config.tutor.sandbox_memory_mib,
            sandbox_semaphore=self._sandbox_semaphore,
        )

    def _load_mock_script(self) -> dict | None:
        if self.config.mock.script_path:
            import json

            return json.loads(Path(self.config.mock.script_path).read_text(encoding="utf-8"))
        return None

    @property
    def mock_backend(self) -> MockBackend | None:
        return self.generator_backend if isinstance(self.generator_backend, MockBackend) else None

    # -- indices ---------------------------------------------------------------

    def ingest(self, manifest_path: str | Path, out_dir: str | Path | None = None) -> tuple[int, int]:
        """Build and persist both indices from a corpus manifest; returns the
        chunk counts (hybrid, quiz)."""
        documents = load_manifest(manifest_path)
        chunking = self.config.chunking
        hybrid, quiz = ingest_corpus(
            documents,
            self.generator_backend,
            target_tokens=chunking.target_tokens,
            min_tokens=chunking.min_tokens,
            boundary_threshold=chunking.boundary_threshold,
        )
        out = Path(out_dir) if out_dir is not None else Path(self.config.index_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_index(hybrid, out / "hybrid.aceidx")
        save_index(quiz, out / "quiz.aceidx")
        self._hybrid, self._quiz = hybrid, quiz
        log.info("ingested %d documents into %d chunks", len(documents), len(hybrid))
        return len(hybrid), len(quiz)

    @property
    def hybrid_index(self) -> HybridIndex:
        if self._hybrid is None:
            path = self.config.hybrid_index_path
            if not path.is_file():
                raise InputError(f"hybrid index missing at {path}; run ingest first")
            self._hybrid = load_index(path)
        return self._hybrid

    @property
    def quiz_index(self) -> QuizIndex:
        if self._quiz is None:
            path = self.config.quiz_index_path
            if not path.is_file():
                raise InputError(f"quiz index missing at {path}; run ingest first")
            self._quiz = load_index(path)
        return self._quiz

    def indices_present(self) -> bool:
        return self.config.hybrid_index_path.is_file() and self.config.quiz_index_path.is_file()

    # -- pipelines ---------------------------------------------------------------

    def route(self, query: str):
        return self.router.route(query)

    @property
    def qa(self) -> QaPipeline:
        if self._qa is None:
            self._qa = QaPipeline(
                self.generator_backend,
                self.hybrid_index,
                self.prompts,
                k_per_channel=self.config.retrieval.k_per_channel,
                final_k=self.config.retrieval.final_k,
                insufficiency_threshold=self.config.qa.insufficiency_threshold,
            )
        return self._qa

    @property
    def quiz(self) -> QuizEngine:
        # Cached: the quiz engine keeps per-session context/framework state.
        if self._quiz_engine is None:
            generator = QuizGenerator(
                self.generator_backend,
                self.validator_backend,
                self.quiz_index,
                self.prompts,
                mmr_params=MmrParams(
                    lam=self.config.retrieval.mmr_lambda,
                    pool_size=self.config.retrieval.mmr_pool_size,
                    select_count=self.config.retrieval.mmr_select_count,
                ),
            )
            self._quiz_engine = QuizEngine(generator, items_per_call=self.config.quiz.items_per_call)
        return self._quiz_engine

    @property
    def start_bloom(self):
        bloom = parse_bloom(self.config.quiz.start_bloom)
        if bloom is None:
            raise InputError(f"bad quiz.start_bloom {self.config.quiz.start_bloom!r}")
        return bloom
