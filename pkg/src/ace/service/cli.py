"""Command-line interface.

Interactive commands (route, ask, quiz, tutor) are thin clients of the HTTP
JSON API: with --server they talk to a running service, otherwise they mount
the FastAPI app in-process over an ASGI transport, so every flow exercises
the same wire surface either way. Batch commands (ingest, eval) drive the
engine directly.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from ace.config import load_config
from ace.errors import AceError


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ace", description="Teaching-assistant engine")
    parser.add_argument("--config", help="path to the JSON config file")
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command")

    p_ingest = sub.add_parser("ingest", parents=[], help="build indices from a corpus manifest")
    p_ingest.add_argument("--manifest", required=True)
    p_ingest.add_argument("--out", default=None, help="index output directory")

    p_ask = sub.add_parser("ask", help="one-shot conceptual question")
    p_ask.add_argument("query")

    p_route = sub.add_parser("route", help="classify a query without dispatching")
    p_route.add_argument("query")

    p_quiz = sub.add_parser("quiz", help="terminal quiz session")
    p_quiz.add_argument("--topic", required=True)
    p_quiz.add_argument("--subtopic-index", type=int, default=0)
    p_quiz.add_argument("--max-items", type=int, default=5)

    p_tutor = sub.add_parser("tutor", help="terminal code-tutor session")
    p_tutor.add_argument("--problem", help="problem statement text")
    p_tutor.add_argument("--problem-file", help="JSON problem fixture")

    p_eval = sub.add_parser("eval", help="metrics over transcript directories")
    eval_sub = p_eval.add_subparsers(dest="eval_command")
    p_cov = eval_sub.add_parser("coverage", help="entropy/evenness over quiz transcripts")
    p_cov.add_argument("--transcripts", required=True)
    p_cov.add_argument("--out", default="eval-out")
    p_rob = eval_sub.add_parser("robustness", help="DWPM/effective-size over tutor runs")
    p_rob.add_argument("--runs", required=True)
    p_rob.add_argument("--models", required=True)
    p_rob.add_argument("--out", default="eval-out")
    p_cor = eval_sub.add_parser("correlate", help="Spearman between capacity and DWPM")
    p_cor.add_argument("--runs", required=True)
    p_cor.add_argument("--models", required=True)
    p_cor.add_argument("--out", default="eval-out")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8722)

    return parser


class _ClientHandle:
    """An httpx client plus the cleanup owed by the embedded service."""

    def __init__(self, client: httpx.Client, store=None):
        self.client = client
        self._store = store

    def __enter__(self) -> httpx.Client:
        return self.client

    def __exit__(self, *exc_info):
        if self._store is not None:
            self._store.flush_all()  # persist transcripts of in-process sessions
        self.client.close()


def _client(args) -> _ClientHandle:
    if args.server:
        return _ClientHandle(httpx.Client(base_url=args.server, timeout=300.0))
    from starlette.testclient import TestClient

    from ace.engine import Engine
    from ace.service.app import create_app

    engine = Engine(load_config(args.config))
    app = create_app(engine)
    # Synchronous in-process bridge to the ASGI app: the CLI stays a pure
    # HTTP client of the same surface a remote service exposes.
    client = TestClient(app, raise_server_exceptions=False)
    return _ClientHandle(client, store=app.state.sessions)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    data = response.json()
    if response.status_code >= 400:
        detail = data.get("detail", data)
        raise AceError(f"{path} failed ({response.status_code}): {detail}")
    return data


def cmd_ingest(args) -> int:
    from ace.engine import Engine

    engine = Engine(load_config(args.config))
    hybrid_count, quiz_count = engine.ingest(args.manifest, args.out)
    out = Path(args.out) if args.out else Path(engine.config.index_dir)
    print(f"hybrid index: {hybrid_count} chunks -> {out / 'hybrid.aceidx'}")
    print(f"quiz index:   {quiz_count} chunks -> {out / 'quiz.aceidx'}")
    return 0


def cmd_route(args) -> int:
    with _client(args) as client:
        data = _post(client, "/v1/route", {"query": args.query})
    print(f"label: {data['label']}  (parse: {data['parse_path']})")
    return 0


def cmd_ask(args) -> int:
    with _client(args) as client:
        data = _post(client, "/v1/qa/ask", {"query": args.query})
    print(data["answer_text"])
    print()
    if data["insufficient"]:
        print("insufficient support: yes")
    for chunk in data["context_chunks"]:
        print(f"  [[chunk {chunk['chunk_id']}]] score={chunk['score']:.4f}")
    return 0


def _read_answer(prompt: str) -> str:
    if sys.stdin.isatty():
        return input(prompt)
    line = sys.stdin.readline()
    if not line:
        raise EOFError
    return line.strip()


def cmd_quiz(args) -> int:
    with _client(args) as client:
        state = _post(
            client,
            "/v1/quiz/start",
            {"topic": args.topic, "subtopic_index": args.subtopic_index},
        )
        print(f"topic: {state['topic']}  subtopic: {state['subtopic']}")
        print(f"subtopics: {', '.join(state['subtopics'])}")
        answered = 0
        while state["pending_item"] and answered < args.max_items:
            item = state["pending_item"]
            print(f"\n[{item['bloom']}] {item['stem']}")
            for label in ("A", "B", "C", "D"):
                print(f"  {label}) {item['options'][label]}")
            try:
                label = _read_answer("answer> ").strip().upper()
            except EOFError:
                break
            data = _post(
                client, "/v1/quiz/answer", {"session_id": state["session_id"], "label": label}
            )
            answered += 1
            feedback = data["feedback"]
            if data["correct"]:
                print("correct!")
            else:
                print(f"incorrect. answer: {feedback['correct_label']}) {feedback['correct_text']}")
                if feedback["chosen_rationale"]:
                    print(f"why {label} is tempting: {feedback['chosen_rationale']}")
            print(f"difficulty now: {data['current_bloom']}")
            state["pending_item"] = data["next_item"]
        print(f"\nsession {state['session_id']} finished ({answered} answers)")
    return 0


def cmd_tutor(args) -> int:
    if not args.problem and not args.problem_file:
        raise AceError("tutor needs --problem or --problem-file")
    payload = {"problem": args.problem or "", "io_cases": []}
    if args.problem_file:
        fixture = json.loads(Path(args.problem_file).read_text(encoding="utf-8"))
        payload = {
            "problem": fixture["statement"],
            "problem_id": fixture.get("problem_id", ""),
            "difficulty": fixture.get("difficulty", "easy"),
            "io_cases": fixture.get("io_cases", []),
        }
    with _client(args) as client:
        state = _post(client, "/v1/tutor/start", payload)
        print("plan:")
        for i, step in enumerate(state["plan"]):
            print(f"  {i + 1}. {step}")
        while True:
            index = state["current_index"]
            if index >= len(state["steps"]):
                break
            step = state["steps"][index]
            print(f"\nstep {index + 1}: {step['description']}")
            if state["cumulative_code"]:
                print("code so far:")
                for line in state["cumulative_code"].split("\n"):
                    print(f"    {line}")
            print("type the new lines (finish with a single '.' line):")
            lines = []
            try:
                while True:
                    line = _read_answer("")
                    if line == ".":
                        break
                    lines.append(line)
            except EOFError:
                if not lines:
                    print("no input; stopping")
                    return 0
            data = _post(
                client,
                "/v1/tutor/submit",
                {
                    "session_id": state["session_id"],
                    "step_index": index,
                    "snippet": "\n".join(lines),
                },
            )
            if data["outcome"] == "passed":
                print("step passed")
            elif data["outcome"] == "step_failed":
                print("step failed after 5 attempts; the reference solution was installed")
            else:
                print(f"not yet ({data['attempts_remaining']} attempts left)")
                for key in ("gate_error", "sandbox_error"):
                    if data[key]:
                        print(f"  {key.replace('_', ' ')}: {data[key]}")
                if data["verdict"]:
                    for key in ("flaw_summary", "learner_thought_model", "improvement_hint"):
                        if data["verdict"][key]:
                            print(f"  {key.replace('_', ' ')}: {data['verdict'][key]}")
            state = client.get(
                "/v1/tutor/state", params={"session_id": state["session_id"]}
            ).json()
        print("\nall steps resolved; running final checks")
        final = _post(client, "/v1/tutor/finalize", {"session_id": state["session_id"]})
        print(f"completed: {final['completed']} (attempts: {final['attempts_used']})")
        for case in final["case_results"]:
            print(f"  matched={case['matched']} expected={case['expected']!r} actual={case['actual']!r}")
    return 0


def cmd_eval(args) -> int:
    from ace.metrics import reports as metrics_reports

    if args.eval_command == "coverage":
        paths = sorted(Path(args.transcripts).glob("**/*.json"))
        matrix = metrics_reports.relevance_matrix_from_transcripts(paths)
        out = metrics_reports.write_coverage_report(matrix, Path(args.out))
        print(f"coverage written: {out}")
        return 0
    specs = metrics_reports.load_model_specs(Path(args.models))
    records = metrics_reports.records_from_runs(Path(args.runs), specs)
    if args.eval_command == "robustness":
        out = metrics_reports.write_robustness_report(records, Path(args.out))
        print(f"robustness written: {out}")
        return 0
    if args.eval_command == "correlate":
        out = metrics_reports.write_correlation_report(records, Path(args.out))
        print(f"correlation written: {out}")
        return 0
    raise AceError("eval needs one of: coverage, robustness, correlate")


def cmd_serve(args) -> int:
    from ace.engine import Engine
    from ace.service.app import serve

    engine = Engine(load_config(args.config))
    serve(engine, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 1
    if args.command == "eval" and not getattr(args, "eval_command", None):
        parser.parse_args(["eval", "--help"])
        return 1
    handlers = {
        "ingest": cmd_ingest,
        "ask": cmd_ask,
        "route": cmd_route,
        "quiz": cmd_quiz,
        "tutor": cmd_tutor,
        "eval": cmd_eval,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except AceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
