"""
Command Line Interface for GROUNDKIT
"""

import functools
import json
import sys
from pathlib import Path
from typing import Dict, Optional

try:
    import typer
    from rich.console import Console
    from rich.panel import Panel
    from rich.progress import Progress, SpinnerColumn, TextColumn
    from rich.table import Table
    from rich.text import Text
except ImportError:
    print("CLI requires additional dependencies. Install with: pip install groundkit[cli]")
    sys.exit(1)

import numpy as np

from . import __version__
from .config.settings import GroundkitConfig, create_sample_config, load_config
from .core import io
from .core.assets import AssetStore
from .core.cues import fit_position_svms
from .core.learn import learn_weights_q, learn_weights_s
from .core.metrics import RecallCount, RecallReport, recall_at_1, recall_by_cue, upper_bound
from .core.pipeline import GroundingPipeline, retrieval_upper_bound, save_predictions
from .core.ppc import PairBankTrainer
from .core.synth import SynthConfig, synth_grounding_dataset, synth_vrd_dataset
from .core.vrd import (
    VrdScorer,
    VrdTrainer,
    VrdTrainingImage,
    aggregate_recall,
    eval_recall_at,
    mark_zero_shot,
    training_triples,
)
from .errors import ConfigurationError, DataFormatError, GroundkitError
from .learners.cca import fit_cca
from .learners.svm import RbfSvmTrainer
from .models.bundle import PHRASE_REGION_CCA, WeightedModelBundle
from .models.cues import PPC_SLOTS, SPC_SLOTS
from .solvers.factory import SolverFactory
from .utils.logger import setup_logging

app = typer.Typer(help="GROUNDKIT - Phrase grounding with single-phrase and phrase-pair cues")
console = Console()

# global options set by the callback
state: Dict[str, object] = {"config": None, "seed": None, "threads": None}


def show_banner():
    """Show GROUNDKIT banner"""
    banner = """
    ╔═══════════════════════════════════════════════════════════╗
    ║                       GROUNDKIT                           ║
    ║     Phrase localization with linguistic cue weighting     ║
    ╚═══════════════════════════════════════════════════════════╝
    """
    console.print(banner, style="bold blue")


def handle_errors(command):
    """Report GroundkitError (and missing files) as JSON on stderr and exit 1"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except GroundkitError as e:
            typer.echo(json.dumps(e.to_dict()), err=True)
            raise typer.Exit(1)
        except FileNotFoundError as e:
            typer.echo(json.dumps({"error": "file_not_found", "message": str(e)}), err=True)
            raise typer.Exit(1)
        except ValueError as e:
            typer.echo(json.dumps({"error": "invalid_value", "message": str(e)}), err=True)
            raise typer.Exit(1)

    return wrapper


def get_config() -> GroundkitConfig:
    config = state["config"]
    if config is None:
        raise ConfigurationError("Configuration not loaded")
    return config


def get_seed(override: Optional[int] = None) -> int:
    """Command-level --seed wins over the global one"""
    return override if override is not None else int(state["seed"])


def get_threads() -> int:
    return int(state["threads"])


def load_bundle(path: Optional[str]) -> WeightedModelBundle:
    if path and Path(path).exists():
        return WeightedModelBundle.load(path)
    return WeightedModelBundle()


def save_bundle(bundle: WeightedModelBundle, path: str) -> None:
    config = get_config()
    bundle.config_fingerprint = config.fingerprint()
    bundle.versions = {"groundkit": __version__}
    bundle.save(path)
    console.print(f"✅ Bundle written: {path}", style="green")


def recall_table(report: RecallReport, title: str) -> Table:
    table = Table(title=title)
    table.add_column("Phrase type", style="cyan")
    table.add_column("Correct", justify="right")
    table.add_column("Total", justify="right")
    table.add_column("Recall", justify="right", style="green")
    for name, count in report.by_type.items():
        table.add_row(name, str(count.correct), str(count.total), _ratio(count.recall))
    table.add_row(
        Text("overall", style="bold"),
        str(report.overall.correct),
        str(report.overall.total),
        Text(_ratio(report.overall.recall), style="bold green"),
    )
    return table


def _ratio(value: Optional[float]) -> str:
    return f"{value:.4f}" if value is not None else "n/a"


@app.callback()
def main_options(
    config: Optional[str] = typer.Option(None, "--config", "-c", help="Configuration file path"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides runtime.seed)"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads (overrides runtime.threads)"),
    debug: bool = typer.Option(False, "--debug", "-d", help="Enable debug mode"),
    log_file: Optional[str] = typer.Option(None, "--log-file", help="Also write logs to this file"),
):
    """
    Global options shared by every command
    """
    try:
        groundkit_config = load_config(config)
    except Exception as e:
        typer.echo(json.dumps({"error": "configuration_error", "message": str(e)}), err=True)
        raise typer.Exit(1)
    if debug:
        groundkit_config.debug = True
    if seed is not None:
        groundkit_config.runtime.seed = seed
    if threads is not None:
        groundkit_config.runtime.threads = max(1, threads)
    state["config"] = groundkit_config
    state["seed"] = groundkit_config.runtime.seed
    state["threads"] = groundkit_config.runtime.threads
    setup_logging(debug=groundkit_config.debug, log_file=log_file)


# Grounding


@app.command("extract-cues")
@handle_errors
def extract_cues(
    sentences: str = typer.Option(..., "--sentences", help="Sentences JSONL"),
    candidates: str = typer.Option(..., "--candidates", help="Candidate boxes JSONL"),
    output: str = typer.Option("cues.jsonl", "--output", "-o", help="Cue table JSONL to write"),
    bundle: Optional[str] = typer.Option(None, "--bundle", "-b", help="Model bundle (CCA, position SVMs)"),
    scores: Optional[str] = typer.Option(None, "--scores", help="Detector score JSONL"),
    vectors: Optional[str] = typer.Option(None, "--vectors", help="Phrase and region feature table"),
):
    """
    Compute the 14 single-phrase cue costs of every phrase
    """
    config = get_config()
    records = io.read_sentences(sentences)
    pipeline = GroundingPipeline(
        config,
        bundle=load_bundle(bundle),
        detector_tables=io.read_detector_scores(scores) if scores else None,
        vectors=io.read_vectors(vectors) if vectors else None,
    )
    boxes = io.read_candidates(candidates)
    tables = []
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        task = progress.add_task("Assembling cue tables...", total=None)
        for record in records:
            image = boxes.get(record.image_id)
            if image is None:
                pipeline.logger.warning(f"⚠️ No candidates for image {record.image_id}")
                continue
            tables.append(pipeline.cue_table(record, image, pipeline.relations(record)))
        progress.update(task, description="✅ Cue tables assembled")
    count = io.write_cue_tables(output, tables)
    console.print(f"✅ {count} phrase rows written to {output}", style="green")


@app.command("fit-cca")
@handle_errors
def fit_cca_command(
    x: str = typer.Option(..., "--x", help="Vector table of the first view (e.g. phrases)"),
    y: str = typer.Option(..., "--y", help="Vector table of the second view (e.g. regions), same keys"),
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Bundle to update"),
    name: str = typer.Option(PHRASE_REGION_CCA, "--name", help="Name of the CCA model in the bundle"),
    components: Optional[int] = typer.Option(None, "--components", help="Canonical components"),
):
    """
    Fit a CCA embedding on paired vectors (rows matched by key)
    """
    config = get_config()
    xs, ys = io.read_vectors(x), io.read_vectors(y)
    keys = sorted(set(xs) & set(ys))
    if len(keys) < 2:
        raise DataFormatError(f"Only {len(keys)} keys shared by both views")
    xm = np.array([xs[k] for k in keys])
    ym = np.array([ys[k] for k in keys])
    k = min(components or config.cca.components, xm.shape[1], ym.shape[1])
    model = fit_cca(xm, ym, k, reg=config.cca.reg, eig_power=config.cca.eig_power)

    target = load_bundle(bundle)
    target.cca[name] = model
    save_bundle(target, bundle)
    console.print(f"📊 {len(keys)} pairs, {k} components", style="blue")


@app.command("train-position-svm")
@handle_errors
def train_position_svm(
    sentences: str = typer.Option(..., "--sentences", help="Training sentences JSONL with GT boxes"),
    candidates: str = typer.Option(..., "--candidates", help="Candidate boxes JSONL (negatives)"),
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Bundle to update"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed for this command"),
):
    """
    Train one position SVM per phrase type
    """
    config = get_config()
    svm = config.svm
    trainer = RbfSvmTrainer(c=svm.c, gamma=svm.gamma, kkt_tol=svm.kkt_tol, max_iter=svm.max_iter, platt_folds=svm.platt_folds)
    models = fit_position_svms(
        io.read_sentences(sentences),
        io.read_candidates(candidates),
        trainer,
        neg_ratio=svm.neg_ratio,
        correct_iou=config.retrieval.correct_iou,
        seed=get_seed(seed),
    )
    target = load_bundle(bundle)
    target.position_svms = models
    save_bundle(target, bundle)


@app.command("train-pair-bank")
@handle_errors
def train_pair_bank_command(
    sentences: str = typer.Option(..., "--sentences", help="Training sentences JSONL with GT boxes"),
    cues: str = typer.Option(..., "--cues", help="Cue tables of the training sentences"),
    output: str = typer.Option("pair_bank", "--output", "-o", help="Pair bank directory"),
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Bundle to update (ws is read from it)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed for this command"),
):
    """
    Train the bank of per-key pair classifiers
    """
    config = get_config()
    target = load_bundle(bundle)
    pipeline = GroundingPipeline(config, bundle=target)
    samples = pipeline.pair_samples(io.read_cue_tables(cues), io.read_sentences(sentences))
    svm = config.svm
    trainer = PairBankTrainer(
        pipeline.assets.pair_key_builder(config.pairs.restrict_to_dictionary),
        min_count=config.pairs.min_count,
        neg_ratio=config.pairs.neg_ratio,
        trainer=RbfSvmTrainer(c=svm.c, gamma=svm.gamma, kkt_tol=svm.kkt_tol, max_iter=svm.max_iter, platt_folds=svm.platt_folds),
        correct_iou=config.retrieval.correct_iou,
        debug=config.debug,
    )
    bank = trainer.fit(samples, seed=get_seed(seed))
    bank.save(output)
    target.pair_bank_dir = str(Path(output))
    save_bundle(target, bundle)
    console.print(f"✅ {len(bank)} pair classifiers, {len(trainer.skipped)} keys below min_count", style="green")


@app.command("learn-weights")
@handle_errors
def learn_weights(
    stage: str = typer.Option("spc", "--stage", help="spc (w^S) or ppc (w^Q)"),
    val: str = typer.Option(..., "--val", help="Validation directory (cues.jsonl, pairs.jsonl or sentences.jsonl)"),
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Bundle to update"),
    restarts: Optional[int] = typer.Option(None, "--restarts", help="Random restarts"),
    method: Optional[str] = typer.Option(None, "--method", help="direct or rank_svm (spc stage)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed for this command"),
):
    """
    Learn cue weights by direct search on validation recall
    """
    config = get_config()
    if restarts is not None:
        config.search.restarts = restarts
    val_dir = Path(val)
    target = load_bundle(bundle)

    if stage == "spc":
        tables = io.read_cue_tables(val_dir / "cues.jsonl")
        result = learn_weights_s(
            tables, config.search, get_seed(seed), get_threads(), config.retrieval.correct_iou, method
        )
        target.ws = np.asarray(result.weights)
        names = SPC_SLOTS
    elif stage == "ppc":
        pairs_file = val_dir / "pairs.jsonl"
        if pairs_file.exists():
            examples = io.read_pair_examples(pairs_file)
        else:
            pipeline = GroundingPipeline(config, bundle=target)
            examples = pipeline.pair_examples(
                io.read_cue_tables(val_dir / "cues.jsonl"), io.read_sentences(val_dir / "sentences.jsonl")
            )
        result = learn_weights_q(examples, target.ws, config.search, get_seed(seed), get_threads())
        target.wq = np.asarray(result.weights)
        names = PPC_SLOTS
    else:
        raise ConfigurationError(f"Unknown stage '{stage}' (use spc or ppc)")

    table = Table(title=f"Learned {stage.upper()} weights")
    table.add_column("Cue", style="cyan")
    table.add_column("Weight", justify="right", style="green")
    for cue, weight in zip(names, result.weights):
        table.add_row(cue, f"{weight:.6f}")
    console.print(table)
    console.print(f"📊 Validation count {result.recall}/{result.total} ({result.ratio:.4f})", style="blue")
    save_bundle(target, bundle)


@app.command()
@handle_errors
def infer(
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Model bundle"),
    output: str = typer.Option("predictions.jsonl", "--output", "-o", help="Predictions JSONL to write"),
    cues: Optional[str] = typer.Option(None, "--cues", help="Precomputed cue tables"),
    sentences: Optional[str] = typer.Option(None, "--sentences", help="Sentences JSONL (relations, or cues from scratch)"),
    candidates: Optional[str] = typer.Option(None, "--candidates", help="Candidate boxes JSONL"),
    scores: Optional[str] = typer.Option(None, "--scores", help="Detector score JSONL"),
    vectors: Optional[str] = typer.Option(None, "--vectors", help="Phrase and region feature table"),
    solver: Optional[str] = typer.Option(None, "--solver", help="exact, relaxed or auto"),
):
    """
    Ground every phrase: retrieval plus joint assignment
    """
    config = get_config()
    if solver:
        config.solver.provider = solver
    pipeline = GroundingPipeline(
        config,
        bundle=load_bundle(bundle),
        detector_tables=io.read_detector_scores(scores) if scores else None,
        vectors=io.read_vectors(vectors) if vectors else None,
    )
    records = io.read_sentences(sentences) if sentences else None
    if cues:
        result = pipeline.run_tables(io.read_cue_tables(cues), records, get_threads())
    elif records is not None and candidates:
        result = pipeline.run(records, io.read_candidates(candidates), get_threads())
    else:
        raise ConfigurationError("Give --cues, or --sentences with --candidates")
    count = save_predictions(output, result)
    console.print(f"✅ {count} predictions written to {output}", style="green")


@app.command("eval")
@handle_errors
def evaluate(
    pred: str = typer.Option(..., "--pred", help="Predictions JSONL"),
    gt: str = typer.Option(..., "--gt", help="Sentences JSONL with GT boxes"),
    cues: Optional[str] = typer.Option(None, "--cues", help="Cue tables, for the per-cue breakdown"),
    csv: Optional[str] = typer.Option(None, "--csv", help="Also write the per-type table as CSV"),
):
    """
    Recall@1 overall and per phrase type
    """
    config = get_config()
    predictions = io.prediction_map(io.read_predictions(pred))
    records = io.read_sentences(gt)
    report = recall_at_1(predictions, records, config.retrieval.correct_iou)
    console.print(recall_table(report, "Recall@1"))
    if cues:
        by_cue = recall_by_cue(predictions, records, io.read_cue_tables(cues), config.retrieval.correct_iou)
        console.print(_cue_table(by_cue))
    if csv:
        _write_csv(report, csv)


def _cue_table(by_cue: Dict[str, RecallCount]) -> Table:
    table = Table(title="Recall@1 where each cue is available")
    table.add_column("Cue", style="cyan")
    table.add_column("Phrases", justify="right")
    table.add_column("Recall", justify="right", style="green")
    for cue, count in by_cue.items():
        table.add_row(cue, str(count.total), _ratio(count.recall))
    return table


def _write_csv(report: RecallReport, path: str) -> None:
    lines = ["type,correct,total,recall"]
    for name, count in list(report.by_type.items()) + [("overall", report.overall)]:
        lines.append(f"{name},{count.correct},{count.total},{_ratio(count.recall)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    console.print(f"✅ Table written: {path}", style="green")


@app.command("upper-bound")
@handle_errors
def upper_bound_command(
    cues: str = typer.Option(..., "--cues", help="Cue tables (candidate sets)"),
    gt: str = typer.Option(..., "--gt", help="Sentences JSONL with GT boxes"),
    bundle: Optional[str] = typer.Option(None, "--bundle", "-b", help="Apply top-M retrieval under the bundle's w^S"),
):
    """
    Share of phrases with at least one good candidate
    """
    config = get_config()
    tables = io.read_cue_tables(cues)
    records = io.read_sentences(gt)
    if bundle:
        cfg = config.retrieval
        report = retrieval_upper_bound(
            tables, records, load_bundle(bundle).ws, cfg.m, cfg.nms_iou, cfg.correct_iou
        )
    else:
        candidates = {
            (t.sentence_id, pid): list(t.candidates) for t in tables for pid in t.phrase_ids
        }
        report = upper_bound(candidates, records, config.retrieval.correct_iou)
    console.print(recall_table(report, "Upper bound"))


# Relationship detection


def _training_images(detections: str, gt: str):
    gts = {g.image_id: g for g in io.read_vrd_ground_truth(gt)}
    images = []
    for det in io.read_vrd_detections(detections):
        if det.image_id in gts:
            images.append(VrdTrainingImage(detections=det, gt=gts[det.image_id]))
    return images


@app.command("vrd-train")
@handle_errors
def vrd_train(
    vocab: str = typer.Option(..., "--vocab", help="Vocabulary JSON"),
    detections: str = typer.Option(..., "--detections", help="Training detections JSONL"),
    gt: str = typer.Option(..., "--gt", help="Training relationships JSONL"),
    vectors: str = typer.Option(..., "--vectors", help="Region feature table"),
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Bundle to update"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed for this command"),
):
    """
    Train the relationship detection models
    """
    config = get_config()
    vocabulary = io.read_vocabulary(vocab)
    _check_vocabulary(vocabulary, config)
    images = _training_images(detections, gt)
    scorer = VrdTrainer(config).fit(images, vocabulary, io.read_vectors(vectors), seed=get_seed(seed))
    target = load_bundle(bundle)
    scorer.update_bundle(target)
    save_bundle(target, bundle)


def _check_vocabulary(vocabulary, config: GroundkitConfig) -> None:
    if len(vocabulary.object_classes) != config.vrd.n_objects:
        console.print(
            f"⚠️ {len(vocabulary.object_classes)} object classes, configuration expects {config.vrd.n_objects}",
            style="yellow",
        )
    if len(vocabulary.predicates) != config.vrd.n_predicates:
        console.print(
            f"⚠️ {len(vocabulary.predicates)} predicates, configuration expects {config.vrd.n_predicates}",
            style="yellow",
        )


@app.command("vrd-score")
@handle_errors
def vrd_score(
    vocab: str = typer.Option(..., "--vocab", help="Vocabulary JSON"),
    detections: str = typer.Option(..., "--detections", help="Detections JSONL"),
    vectors: str = typer.Option(..., "--vectors", help="Region feature table"),
    bundle: str = typer.Option("bundle.json", "--bundle", "-b", help="Bundle with VRD models"),
    output: str = typer.Option("relationships.jsonl", "--output", "-o", help="Scored candidates JSONL"),
):
    """
    Score (subject, predicate, object) hypotheses for every image
    """
    config = get_config()
    scorer = VrdScorer.from_bundle(WeightedModelBundle.load(bundle), io.read_vocabulary(vocab), config.vrd.top_k)
    table = io.read_vectors(vectors)
    scored = {
        det.image_id: scorer.score_relationships(det, table) for det in io.read_vrd_detections(detections)
    }
    count = io.write_relationship_candidates(output, scored)
    console.print(f"✅ {count} relationship candidates written to {output}", style="green")


@app.command("vrd-eval")
@handle_errors
def vrd_eval(
    candidates: str = typer.Option(..., "--candidates", help="Scored candidates JSONL"),
    gt: str = typer.Option(..., "--gt", help="Test relationships JSONL"),
    k: int = typer.Option(100, "--k", help="Recall cut-off"),
    zero_shot: bool = typer.Option(False, "--zero-shot", help="Only triples unseen in training"),
    train_gt: Optional[str] = typer.Option(None, "--train-gt", help="Training relationships, to flag unseen triples"),
):
    """
    Recall@K of relationship detection
    """
    config = get_config()
    gts = io.read_vrd_ground_truth(gt)
    if train_gt:
        seen = training_triples(io.read_vrd_ground_truth(train_gt))
        gts = [mark_zero_shot(g, seen) for g in gts]
    scored = io.read_relationship_candidates(candidates)
    results = [
        eval_recall_at(
            scored.get(g.image_id, []), g, k, zero_shot_only=zero_shot, one_to_one=config.vrd.one_to_one,
            correct_iou=config.retrieval.correct_iou,
        )
        for g in gts
    ]
    pooled = aggregate_recall(results)
    table = Table(title=f"R@{k}" + (" (zero-shot)" if zero_shot else ""))
    table.add_column("Matched", justify="right")
    table.add_column("Total", justify="right")
    table.add_column("Recall", justify="right", style="green")
    table.add_row(str(pooled.matched), str(pooled.total), _ratio(pooled.recall))
    console.print(table)


# Data and configuration


@app.command()
@handle_errors
def synth(
    output: str = typer.Option("synth", "--output", "-o", help="Output directory"),
    kind: str = typer.Option("grounding", "--kind", help="grounding or vrd"),
    images: int = typer.Option(50, "--images", help="Images to generate"),
    phrases: int = typer.Option(3, "--phrases", help="Phrases per image (grounding)"),
    candidates: int = typer.Option(6, "--candidates", help="Candidates per phrase (grounding)"),
    noise: float = typer.Option(0.05, "--noise", help="Noise on the informative cue"),
    density: float = typer.Option(1.0, "--density", help="Relation density (grounding)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed for this command"),
):
    """
    Generate a synthetic dataset with planted structure
    """
    if kind == "grounding":
        synth_config = SynthConfig(
            n_images=images, phrases_per_image=phrases, candidates_per_phrase=candidates,
            noise=noise, relation_density=density,
        )
        files = synth_grounding_dataset(synth_config, get_seed(seed)).write(output)
    elif kind == "vrd":
        files = synth_vrd_dataset(n_train=images, n_test=max(1, images // 4), seed=get_seed(seed), noise=noise).write(output)
    else:
        raise ConfigurationError(f"Unknown dataset kind '{kind}' (use grounding or vrd)")
    for name, path in files.items():
        console.print(f"✅ {name}: {path}", style="green")


@app.command()
def config_create(
    output: str = typer.Option("groundkit_config.yaml", "--output", "-o", help="Output config file path"),
):
    """
    Create a sample configuration file
    """
    show_banner()

    try:
        create_sample_config(output)
        console.print(f"✅ Sample configuration created: {output}", style="green")
        console.print("💡 Edit the file to customize your settings", style="yellow")
    except Exception as e:
        console.print(f"❌ Failed to create config: {str(e)}", style="red")
        raise typer.Exit(1)


@app.command()
def config_validate(
    config: Optional[str] = typer.Option(None, "--config", "-c", help="Configuration file to validate"),
):
    """
    Validate configuration file and dictionary assets
    """
    show_banner()

    try:
        groundkit_config = GroundkitConfig.from_file(config) if config else get_config()
    except Exception as e:
        console.print(f"❌ Configuration error: {str(e)}", style="red")
        raise typer.Exit(1)

    console.print("🔍 Validating configuration...", style="blue")
    status = {}
    try:
        assets = AssetStore(groundkit_config.cues.assets_dir, validate_counts=False)
        problems = assets.validate_counts()
        status["dictionary_counts"] = not problems
        for problem in problems:
            console.print(f"  • {problem}", style="red")
    except GroundkitError as e:
        console.print(f"  • {e}", style="red")
        status["dictionary_counts"] = False
    try:
        SolverFactory.create_solver(groundkit_config)
        status["solver"] = True
    except ValueError:
        status["solver"] = False

    status_table = Table(title="Validation Results")
    status_table.add_column("Component", style="cyan")
    status_table.add_column("Status", style="")
    for component, ok in status.items():
        status_style = "green" if ok else "red"
        status_text = "✅ OK" if ok else "❌ Failed"
        status_table.add_row(component.replace("_", " ").title(), Text(status_text, style=status_style))
    console.print(status_table)

    if all(status.values()):
        console.print("✅ Configuration is valid and ready to use", style="green")
    else:
        console.print("⚠️ Some components failed validation", style="yellow")
        raise typer.Exit(1)


@app.command()
def info():
    """
    Show GROUNDKIT information
    """
    show_banner()

    info_table = Table(title="GROUNDKIT Information")
    info_table.add_column("Property", style="cyan")
    info_table.add_column("Value", style="green")

    info_table.add_row("Version", __version__)
    info_table.add_row("Single-phrase cues", ", ".join(SPC_SLOTS))
    info_table.add_row("Phrase-pair cues", ", ".join(PPC_SLOTS))
    info_table.add_row("Solvers", ", ".join(SolverFactory.get_available_solvers()))
    console.print(info_table)

    examples_panel = Panel(
        """
[cyan]Synthetic data:[/cyan]
  groundkit --seed 7 synth --output val

[cyan]Learn single-phrase weights:[/cyan]
  groundkit --seed 7 learn-weights --stage spc --val val --restarts 20

[cyan]Ground and evaluate:[/cyan]
  groundkit infer --cues val/cues.jsonl --bundle bundle.json
  groundkit eval --pred predictions.jsonl --gt val/sentences.jsonl

[cyan]Relationship detection:[/cyan]
  groundkit vrd-eval --candidates relationships.jsonl --gt test_gt.jsonl --k 100 --zero-shot
        """.strip(),
        title="Usage Examples",
        border_style="blue",
    )
    console.print(examples_panel)


def main():
    """Main entry point for CLI"""
    try:
        app()
    except KeyboardInterrupt:
        console.print("\n❌ Operation cancelled by user", style="red")
        sys.exit(1)
    except Exception as e:
        typer.echo(json.dumps({"error": "unexpected_error", "message": str(e)}), err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
