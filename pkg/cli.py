"""
Command-line entry point
    python cli.py train     --config run.json [overrides]
    python cli.py summarize --checkpoint runs/model.ckpt --input docs.jsonl --output out.jsonl
    python cli.py evaluate  --candidates out.jsonl --references refs.jsonl [--buckets 19,30] [--lead3]
    python cli.py topics    --checkpoint runs/model.ckpt [--top-n 10] [--sweep 5,10,20]
Exit codes: 0 success, 1 validation error or id mismatch, 2 runtime failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import ARTIFACT_NAMES, EXIT_CODES, TOP_TOPIC_WORDS
from corpus.loader import LoadReport, load_jsonl, read_summaries, write_jsonl
from evaluation.baselines import lead3
from evaluation.buckets import parse_boundaries
from evaluation.report import create_sweep_chart, format_summary, match_ids, score_corpus, write_reports
from utils.errors import ConfigValidationError, TaasError, UnmatchedIdsError
from utils.logging_setup import configure_logging
from utils.run_config import RunConfig
from utils.validators import ConfigValidator

logger = logging.getLogger(__name__)


# ==================== COMMANDS ====================
def cmd_train(args: argparse.Namespace) -> int:
    from training.trainer import train

    overrides = {
        "train_path": args.train,
        "validation_path": args.validation,
        "output_dir": args.output_dir,
        "epochs": args.epochs,
        "seed": args.seed,
        "batch_size": args.batch_size,
        "lambda_": args.lambda_,
        "pooling_mode": args.pooling,
        "topics": args.topics,
        "learning_rate": args.learning_rate,
    }
    config = RunConfig.from_file(args.config, overrides).validate()
    print(f"🧠 Training on {config.train_path} (seed {config.seed}, {config.epochs} epochs)...")
    result = train(config, progress=not args.no_progress)
    print(f"✅ Training complete! Best epoch {result.best_epoch}, loss {result.best_loss:.4f}")
    for name, path in result.artifacts.items():
        print(f"📁 {name}: {path}")
    return EXIT_CODES["success"]


def cmd_summarize(args: argparse.Namespace) -> int:
    from summarizer import TopicAwareSummarizer, format_attention_dump

    ConfigValidator.validate_path("checkpoint", args.checkpoint)
    ConfigValidator.validate_path("input", args.input)
    summarizer = TopicAwareSummarizer.from_checkpoint(args.checkpoint)
    trained_limit = summarizer.model.config.max_summary_len
    if args.max_len is not None and args.max_len > trained_limit:
        raise ConfigValidationError("max_len", f"{args.max_len} exceeds the checkpoint's max_summary_len "
                                               f"{trained_limit}")
    decode_config = summarizer.run_config.decode_config(
        beam_size=args.beam,
        max_summary_len=args.max_len,
        min_len=args.min_len,
        length_norm_exponent=args.length_norm,
        no_repeat_ngram_size=args.no_repeat_ngram,
    )

    report = LoadReport(args.input)
    pairs = list(load_jsonl(args.input, report))
    print(f"📄 Summarizing {len(pairs)} document(s) with beam {decode_config.beam_size}...")
    results = summarizer.summarize_batch(pairs, decode_config, dump_attention=args.dump_attention)

    records = [{"id": r["id"], "summary": r["summary"], "score": r["score"]} for r in results]
    write_jsonl(args.output, records)
    print(f"✅ Wrote {len(records)} summaries to {args.output}")
    if report.rejected:
        print(f"⚠️ Skipped {len(report.rejected)} record(s) without a document")

    if args.dump_attention:
        attention_path = Path(args.output).with_suffix(".attention.tsv")
        attention_path.write_text(format_attention_dump(results), encoding="utf-8")
        for r in results:
            top = ", ".join(f"{token} ({weight:.3f})" for token, weight in r["attention"]["top_topic_attention"])
            print(f"🔍 {r['id']}: {top}")
        print(f"📁 attention: {attention_path}")
    return EXIT_CODES["success"]


def cmd_evaluate(args: argparse.Namespace) -> int:
    ConfigValidator.validate_path("references", args.references)
    if not args.candidates and not args.lead3:
        raise ConfigValidationError("candidates", "give --candidates, --lead3, or both")
    ConfigValidator.validate_path("candidates", args.candidates, required=False)
    boundaries = parse_boundaries(args.buckets) if args.buckets else None

    references = read_summaries(args.references)
    reference_summaries = {i: r["summary"] for i, r in references.items()}
    documents = {i: r["document"] for i, r in references.items() if r["document"]}
    if boundaries is not None and len(documents) < len(references):
        raise ConfigValidationError("buckets", "length buckets need a 'document' on every reference record")

    reports = []
    if args.candidates:
        candidates = {i: r["summary"] for i, r in read_summaries(args.candidates).items()}
        match_ids(candidates, reference_summaries)
        reports.append(score_corpus(candidates, reference_summaries, system=args.system,
                                    documents=documents or None, boundaries=boundaries,
                                    summary_level=not args.single_lcs))
    if args.lead3:
        if len(documents) < len(references):
            raise ConfigValidationError("lead3", "Lead-3 needs a 'document' on every reference record")
        baseline = {i: lead3(documents[i]) for i in references}
        reports.append(score_corpus(baseline, reference_summaries, system="lead3",
                                    documents=documents, boundaries=boundaries,
                                    summary_level=not args.single_lcs))

    print(format_summary(reports))
    for report in reports:
        if report.bucket_table is not None:
            print(f"\n📊 {report.system} by length")
            print(report.bucket_table.to_string(index=False))
        if report.abstractiveness:
            print(f"✏️ {report.system} novel unigrams {report.abstractiveness['novel_1']:.2%}, "
                  f"bigrams {report.abstractiveness['novel_2']:.2%}")
    if args.output:
        for path in write_reports(reports, args.output, plot=args.plot):
            print(f"📁 {path}")
    return EXIT_CODES["success"]


def cmd_topics(args: argparse.Namespace) -> int:
    from summarizer import TopicAwareSummarizer

    ConfigValidator.validate_path("checkpoint", args.checkpoint)
    if args.top_n < 1:
        raise ConfigValidationError("top_n", f"must be >= 1, got {args.top_n}")
    summarizer = TopicAwareSummarizer.from_checkpoint(args.checkpoint)
    for k, words in enumerate(summarizer.topics(args.top_n)):
        print("\t".join([f"topic {k}", *(word for word, _ in words)]))

    if args.sweep:
        from training.sweep import topic_sweep

        topic_counts = ConfigValidator.parse_int_list("sweep", args.sweep)
        out = Path(args.output or Path(args.checkpoint).parent / "sweep")
        print(f"🔁 Retraining for K in {topic_counts}...")
        sweep = topic_sweep(summarizer.run_config, topic_counts, out, progress=not args.no_progress)
        out.mkdir(parents=True, exist_ok=True)
        sweep_path = out / ARTIFACT_NAMES["sweep"]
        sweep.to_csv(sweep_path, index=False)
        print(sweep.to_string(index=False))
        print(f"📁 sweep: {sweep_path}")
        if args.plot:
            fig = create_sweep_chart(sweep)
            if fig is not None:
                fig.write_html(str(out / "topic_sweep.html"))
    return EXIT_CODES["success"]


# ==================== ARGUMENT PARSING ====================
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taas", description="Topic-aware abstractive summarization")
    parser.add_argument("--log-level", default=None, help="overrides TAAS_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="train a model from a JSON run config")
    train_p.add_argument("--config", required=True)
    train_p.add_argument("--train", help="training JSONL (overrides train_path)")
    train_p.add_argument("--validation", help="validation JSONL (overrides validation_path)")
    train_p.add_argument("--output-dir")
    train_p.add_argument("--epochs", type=int)
    train_p.add_argument("--seed", type=int)
    train_p.add_argument("--batch-size", type=int)
    train_p.add_argument("--lambda", dest="lambda_", type=float)
    train_p.add_argument("--pooling", choices=("topic", "cls", "sum"))
    train_p.add_argument("--topics", type=int)
    train_p.add_argument("--learning-rate", type=float)
    train_p.add_argument("--no-progress", action="store_true")
    train_p.set_defaults(handler=cmd_train)

    sum_p = sub.add_parser("summarize", help="summarize a JSONL file of documents")
    sum_p.add_argument("--checkpoint", required=True)
    sum_p.add_argument("--input", required=True)
    sum_p.add_argument("--output", required=True)
    sum_p.add_argument("--beam", type=int)
    sum_p.add_argument("--max-len", type=int)
    sum_p.add_argument("--min-len", type=int)
    sum_p.add_argument("--length-norm", type=float)
    sum_p.add_argument("--no-repeat-ngram", type=int)
    sum_p.add_argument("--dump-attention", action="store_true")
    sum_p.set_defaults(handler=cmd_summarize)

    eval_p = sub.add_parser("evaluate", help="score summaries with ROUGE-1/2/L")
    eval_p.add_argument("--candidates")
    eval_p.add_argument("--references", required=True)
    eval_p.add_argument("--system", default="candidate", help="label for the candidate row")
    eval_p.add_argument("--buckets", help="sentence-count boundaries, e.g. 19,30")
    eval_p.add_argument("--lead3", action="store_true", help="also score the Lead-3 baseline")
    eval_p.add_argument("--single-lcs", action="store_true", help="whole-text LCS instead of union-LCS")
    eval_p.add_argument("--output", help="directory for CSV reports")
    eval_p.add_argument("--plot", action="store_true")
    eval_p.set_defaults(handler=cmd_evaluate)

    topics_p = sub.add_parser("topics", help="print top words per topic, optionally sweep K")
    topics_p.add_argument("--checkpoint", required=True)
    topics_p.add_argument("--top-n", type=int, default=TOP_TOPIC_WORDS)
    topics_p.add_argument("--sweep", help="comma-separated topic counts to retrain with")
    topics_p.add_argument("--output", help="directory for the sweep CSV")
    topics_p.add_argument("--plot", action="store_true")
    topics_p.add_argument("--no-progress", action="store_true")
    topics_p.set_defaults(handler=cmd_topics)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (ConfigValidationError, UnmatchedIdsError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_CODES["validation_error"]
    except TaasError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_CODES["runtime_failure"]
    except Exception as e:
        logger.exception("unexpected failure")
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_CODES["runtime_failure"]


if __name__ == "__main__":
    sys.exit(main())
