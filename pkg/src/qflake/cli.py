"""Command-line orchestration of the pipeline.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 provider failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from qflake import errors
from qflake.codectx import ContextLevel, build_code_context
from qflake.config import EmbeddingConfig, RunConfig, load_config
from qflake.corpus.github import HostingApiClient
from qflake.corpus.links import link_case
from qflake.corpus.models import ISSUE, PULL_REQUEST, RepositoryRef, Snapshot
from qflake.corpus.snapshot import read_snapshot, write_snapshot
from qflake.evaluator.experiment import run_experiment, read_results, write_results
from qflake.evaluator.tables import (
    check_reference_table,
    render_repo_stats,
    render_results_table,
    render_taxonomy,
    repo_stats,
    taxonomy_report,
)
from qflake.inference.providers import ProviderConfig
from qflake.promptkit.conditions import enumerate_conditions
from qflake.promptkit.templates import load_templates
from qflake.simsearch.embedding import (
    CachedEmbedder,
    EmbeddingScope,
    HttpEmbeddingProvider,
    MockEmbeddingProvider,
    embed_cases,
    load_embeddings,
    save_embeddings,
)
from qflake.simsearch.expansion import initial_state, load_state, save_state
from qflake.simsearch.ranking import rank_candidates, sample_non_flaky
from qflake.store.dataset import export_archive, load_dataset, persist_dataset, validate_dataset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_PROVIDER = 3


def _embedder(config: EmbeddingConfig):
    if config.provider == "mock":
        return CachedEmbedder(MockEmbeddingProvider())
    if config.provider == "http":
        import os

        api_key = os.environ.get(config.api_key_env) if config.api_key_env else None
        return CachedEmbedder(
            HttpEmbeddingProvider(config.base_url, config.model_id, api_key=api_key)
        )
    raise errors.ConfigError(f"unknown embedding provider {config.provider!r}")


def _load_run_config(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return RunConfig()


def corpus_case_ids(snapshot: Snapshot) -> list[str]:
    """Case artifacts eligible for ranking: issues, plus PRs no issue links."""
    linked_prs: set[str] = set()
    for artifact in snapshot.artifacts:
        linked_prs.update(artifact.linked_prs)
    return sorted(
        a.id
        for a in snapshot.artifacts
        if a.kind == ISSUE or (a.kind == PULL_REQUEST and a.id not in linked_prs)
    )


# --- subcommands -----------------------------------------------------------------


def cmd_ingest(args) -> int:
    config = _load_run_config(args)
    import os

    token = os.environ.get(args.token_env) if args.token_env else None
    client = HostingApiClient(
        base_url=args.api_base,
        token=token,
        parallelism=config.parallelism,
    )
    repos = []
    for slug in args.repos:
        platform, _, name = slug.partition("/")
        if not platform or not name:
            raise errors.ConfigError(f"repository must be platform/name, got {slug!r}")
        repos.append(RepositoryRef(platform, name))

    artifacts = []
    for repo in repos:
        fetched = client.fetch_closed_artifacts(repo)
        logger.info("%s: fetched %d closed artifacts", repo.slug, len(fetched))
        artifacts.extend(fetched)

    # PR commit lists come from the API; text links resolve in a second pass.
    base = Snapshot(
        created_at=datetime.now(timezone.utc),
        repositories=tuple(repos),
        artifacts=tuple(artifacts),
    )
    enriched = []
    for artifact in base.artifacts:
        if artifact.kind == PULL_REQUEST:
            repo = next(r for r in repos if r.slug == artifact.repo_slug)
            shas = client.fetch_pr_commits(repo, artifact.number)
            artifact = _with_pr_commits(artifact, shas)
        enriched.append(artifact)
    base = base.with_artifacts(enriched)
    linked = [link_case(a, base) for a in base.artifacts]
    base = base.with_artifacts(linked)

    commits = []
    payloads: dict[tuple[str, str], bytes] = {}
    failures = []
    wanted = sorted({sha for a in base.artifacts for sha in a.linked_commits})
    for sha in wanted:
        repo = repos[0] if len(repos) == 1 else _repo_for_commit(base, sha, repos)
        try:
            info = client.fetch_commit(repo, sha)
        except errors.NotFoundError:
            logger.warning("commit %s not found; skipping", sha)
            continue
        commits.append(info)
        parent = info.parents[0] if info.parents else None
        for path in info.files:
            for ref in filter(None, (parent, info.sha)):
                blob = client.fetch_file(repo, ref, path)
                if blob is None:
                    continue
                payloads[(ref, path)] = blob

    final = Snapshot(
        created_at=base.created_at,
        repositories=base.repositories,
        artifacts=base.artifacts,
        commits=tuple(commits),
        file_payloads=payloads,
        fetch_failures=tuple(failures),
    )
    write_snapshot(final, args.out)
    print(f"snapshot written to {args.out} ({len(final.artifacts)} artifacts)")
    return EXIT_OK


def _with_pr_commits(artifact, shas):
    from dataclasses import replace

    merged = tuple(dict.fromkeys(tuple(artifact.linked_commits) + tuple(shas)))
    return replace(artifact, linked_commits=merged)


def _repo_for_commit(snapshot: Snapshot, sha: str, repos):
    for artifact in snapshot.artifacts:
        if sha in artifact.linked_commits:
            slug = artifact.repo_slug
            for repo in repos:
                if repo.slug == slug:
                    return repo
    return repos[0]


def cmd_rank(args) -> int:
    config = _load_run_config(args)
    snapshot = read_snapshot(args.snapshot)
    embedder = _embedder(config.embedding)
    scope = EmbeddingScope(config.embedding.scope)

    corpus = corpus_case_ids(snapshot)
    cases = [snapshot.artifact_by_id(cid) for cid in corpus]
    embeddings = embed_cases(
        [c for c in cases if c is not None and (c.title or c.description)],
        scope,
        embedder,
        parallelism=config.parallelism,
    )
    embeddings_path = args.embeddings or f"{args.state}.embeddings.jsonl"
    save_embeddings(embeddings, embeddings_path)

    seeds = [line.strip() for line in Path(args.seeds).read_text(encoding="utf-8").splitlines() if line.strip()]
    missing = [s for s in seeds if s not in embeddings]
    if missing:
        raise errors.ConfigError(f"seed ids missing from the corpus: {missing[:5]}")

    state_path = Path(args.state)
    ranked_corpus = sorted(embeddings)
    if state_path.exists():
        from dataclasses import replace

        state = load_state(state_path)
        queue = rank_candidates(
            ranked_corpus,
            state.all_seeds(),
            embeddings,
            state.queue_size,
            excluded=state.rejected_ids,
        )
        state = replace(state, pending_queue=tuple(queue))
    else:
        state = initial_state(ranked_corpus, seeds, embeddings, k=args.k or config.queue_size)
    save_state(state, state_path)
    print(
        f"iteration {state.iteration}: queue of {len(state.pending_queue)} candidates "
        f"({len(state.all_seeds())} seeds)"
    )
    return EXIT_OK


def cmd_triage_serve(args) -> int:
    import uvicorn

    from qflake.service import TriageService, create_app

    embeddings_path = args.embeddings or f"{args.state}.embeddings.jsonl"
    embeddings = load_embeddings(embeddings_path)
    snapshot = read_snapshot(args.snapshot) if args.snapshot else None
    protected: frozenset[str] = frozenset()
    if args.dataset:
        dataset = load_dataset(args.dataset)
        protected = frozenset(c.id for c in dataset.cases)
    service = TriageService(args.state, embeddings, snapshot, protected)
    app = create_app(service, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def cmd_extract_code(args) -> int:
    snapshot = read_snapshot(args.snapshot)
    dataset = load_dataset(args.dataset)
    present = {ContextLevel.PARTIAL: 0, ContextLevel.FULL: 0}
    for labeled in dataset.cases:
        contexts = {}
        for level in (ContextLevel.PARTIAL, ContextLevel.FULL):
            context = build_code_context(
                labeled.case, level, snapshot, full_context_budget=args.budget
            )
            contexts[level] = context
            if context.present:
                present[level] += 1
        dataset.contexts[labeled.id] = contexts
    persist_dataset(dataset, args.dataset)
    print(
        f"extracted contexts for {len(dataset.cases)} cases: "
        f"{present[ContextLevel.PARTIAL]} with method context, "
        f"{present[ContextLevel.FULL]} with full context"
    )
    return EXIT_OK


def cmd_sample_negatives(args) -> int:
    embeddings_path = args.embeddings or f"{args.state}.embeddings.jsonl"
    embeddings = load_embeddings(embeddings_path)
    state = load_state(args.state)
    picked = sample_non_flaky(
        sorted(embeddings),
        state.all_seeds(),
        embeddings,
        threshold=args.threshold,
        n=args.n,
        hard_negatives=state.rejected_ids,
        include_hard_negatives=args.include_hard_negatives,
    )
    text = "\n".join(picked) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{len(picked)} candidates written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = _load_run_config(args)
    dataset = load_dataset(args.dataset)
    if args.provider == "mock":
        providers = (ProviderConfig(name="mock", model_id="mock-scripted-v1"),)
    else:
        providers = config.require_providers()
    conditions = enumerate_conditions(include_enrichment=args.conditions == "all")
    templates = load_templates(args.template_version)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = run_experiment(
        dataset,
        conditions,
        providers,
        store_path=out_dir / "verdicts.jsonl",
        run_id=args.run_id,
        templates=templates,
        embedder=_embedder(config.embedding),
        request_budget=args.budget or config.request_budget,
    )
    write_results(cells, out_dir / "results.jsonl", template_id=templates.template_id)
    table = render_results_table(cells)
    (out_dir / "results_table.tsv").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    incomplete = [c for c in cells if c.incomplete]
    if incomplete:
        print(f"{len(incomplete)} cell(s) incomplete", file=sys.stderr)
        return EXIT_PROVIDER
    return EXIT_OK


def cmd_report(args) -> int:
    if args.table == "taxonomy":
        dataset = load_dataset(args.dataset)
        sys.stdout.write(render_taxonomy(taxonomy_report(dataset)))
        return EXIT_OK
    if args.table == "repos":
        from qflake.fixtures import (
            CLOSED_COUNTS,
            REFERENCE_REPO_TABLE,
            STATED_CLOSED_TOTAL,
            STATED_FLAKY_TOTAL,
        )

        flags = check_reference_table(
            REFERENCE_REPO_TABLE,
            stated_flaky_total=STATED_FLAKY_TOTAL,
            stated_closed_total=STATED_CLOSED_TOTAL,
        )
        if args.dataset:
            dataset = load_dataset(args.dataset)
            rows = repo_stats(dataset, CLOSED_COUNTS)
            sys.stdout.write(
                render_repo_stats(
                    rows,
                    flags,
                    stated_flaky_total=STATED_FLAKY_TOTAL,
                    stated_closed_total=STATED_CLOSED_TOTAL,
                )
            )
        else:
            sys.stdout.write(
                render_repo_stats(
                    REFERENCE_REPO_TABLE,
                    flags,
                    stated_flaky_total=STATED_FLAKY_TOTAL,
                    stated_closed_total=STATED_CLOSED_TOTAL,
                )
            )
        return EXIT_OK
    if args.table == "results":
        cells = read_results(args.results)
        sys.stdout.write(render_results_table(cells))
        return EXIT_OK
    raise errors.ConfigError(f"unknown table {args.table!r}")


def cmd_validate(args) -> int:
    dataset = load_dataset(args.dataset)
    violations = validate_dataset(dataset, min_reviewers=args.min_reviewers)
    if violations:
        for violation in violations:
            print(str(violation))
        print(f"{len(violations)} violation(s)")
        return EXIT_VALIDATION
    print(
        f"ok: {len(dataset.flaky_cases())} flaky + "
        f"{len(dataset.non_flaky_cases())} non-flaky cases, 0 violations"
    )
    return EXIT_OK


def cmd_export(args) -> int:
    dataset = load_dataset(args.dataset)
    snapshot = read_snapshot(args.snapshot) if args.snapshot else None
    export_archive(dataset, args.out, snapshot)
    print(f"archive written to {args.out}")
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflake",
        description="mine, expand, and classify flaky-test reports in quantum software",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch closed IRs/PRs into an offline snapshot")
    p.add_argument("--config")
    p.add_argument("--api-base", default="https://api.github.com")
    p.add_argument("--token-env", default="QFLAKE_API_TOKEN")
    p.add_argument("--repos", nargs="+", required=True, metavar="PLATFORM/NAME")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("rank", help="embed the corpus and build the triage queue")
    p.add_argument("--config")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--seeds", required=True, help="file with one seed case id per line")
    p.add_argument("--embeddings")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("triage-serve", help="serve the human-in-the-loop triage API")
    p.add_argument("--state", required=True)
    p.add_argument("--snapshot")
    p.add_argument("--embeddings")
    p.add_argument("--dataset")
    p.add_argument("--ui", help="directory of built UI assets to serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_triage_serve)

    p = sub.add_parser("extract-code", help="recover pre-fix code context for dataset cases")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--budget", type=int, default=60_000)
    p.set_defaults(func=cmd_extract_code)

    p = sub.add_parser("sample-negatives", help="sample sub-threshold non-flaky candidates")
    p.add_argument("--state", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--n", type=int, default=71)
    p.add_argument("--include-hard-negatives", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample_negatives)

    p = sub.add_parser("experiment", help="run the condition matrix against providers")
    p.add_argument("--config")
    p.add_argument("--dataset", required=True)
    p.add_argument("--provider", default="", help="'mock' for the scripted offline provider")
    p.add_argument("--conditions", choices=["base", "all"], default="all")
    p.add_argument("--out", required=True)
    p.add_argument("--run-id", default="run1")
    p.add_argument("--budget", type=int)
    p.add_argument("--template-version", default="v1")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="render dataset and experiment tables")
    p.add_argument("--table", required=True, choices=["taxonomy", "repos", "results"])
    p.add_argument("--dataset")
    p.add_argument("--results")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="check dataset invariants")
    p.add_argument("--dataset", required=True)
    p.add_argument("--min-reviewers", type=int, default=2)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export", help="emit the flat publication archive")
    p.add_argument("--dataset", required=True)
    p.add_argument("--snapshot")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except errors.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (errors.ValidationError, errors.SchemaError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (
        errors.ProviderError,
        errors.AuthError,
        errors.NotFoundError,
        errors.RateLimitedError,
    ) as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except errors.IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
