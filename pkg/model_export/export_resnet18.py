#!/usr/bin/env python3
"""Export a ResNet-18 feature extractor to ONNX for the motcom ONNX backend.

The exported graph takes one normalized 3x224x224 image and emits the
512-dimensional globally average-pooled feature vector (the activation just
before the classifier).  Next to ``model.onnx`` a ``model.json`` manifest is
written with the preprocessing constants the consumer applies::

    {"input_size": 224, "mean": [...], "std": [...], "output_dim": 512, ...}

By default the ImageNet-pretrained weights are used; ``--random-init``
skips the weight download for offline smoke runs (the graph and manifest
are identical, the features are just untrained).

Usage:
    python export_resnet18.py --out exported/ [--random-init] [--opset 17]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import torch
import torch.nn as nn
from torchvision.models import ResNet18_Weights, resnet18

INPUT_SIZE = 224
OUTPUT_DIM = 512
DEFAULT_OPSET = 17
IMAGENET_MEAN = [0.485, 0.456, 0.406]
IMAGENET_STD = [0.229, 0.224, 0.225]

MODEL_FILENAME = "model.onnx"
MANIFEST_FILENAME = "model.json"


class ExportError(RuntimeError):
    """Export or verification failed."""


def build_feature_extractor(pretrained: bool = True) -> nn.Module:
    """ResNet-18 with the classifier head replaced by identity.

    The forward pass ends at the global average pool, so the output is one
    512-vector per image.
    """
    weights = ResNet18_Weights.IMAGENET1K_V1 if pretrained else None
    model = resnet18(weights=weights)
    model.fc = nn.Identity()
    model.eval()
    return model


def manifest_payload(opset: int = DEFAULT_OPSET) -> dict:
    return {
        "model": MODEL_FILENAME,
        "input_size": INPUT_SIZE,
        "mean": IMAGENET_MEAN,
        "std": IMAGENET_STD,
        "output_dim": OUTPUT_DIM,
        "opset": opset,
    }


def probe(model: nn.Module, batch: torch.Tensor) -> torch.Tensor:
    with torch.no_grad():
        return model(batch)


def verify_extractor(model: nn.Module) -> None:
    """Shape, finiteness, and determinism checks on the torch module.

    Raises:
        ExportError: any probe fails.
    """
    zeros = torch.zeros(1, 3, INPUT_SIZE, INPUT_SIZE)
    out = probe(model, zeros)
    if tuple(out.shape) != (1, OUTPUT_DIM):
        raise ExportError(f"probe output shape {tuple(out.shape)}, expected (1, {OUTPUT_DIM})")
    if not torch.isfinite(out).all():
        raise ExportError("zero-input probe produced non-finite values")
    fixed = torch.linspace(0, 1, 3 * INPUT_SIZE * INPUT_SIZE).reshape(1, 3, INPUT_SIZE, INPUT_SIZE)
    if not torch.equal(probe(model, fixed), probe(model, fixed)):
        raise ExportError("repeated inference on a fixed input was not bit-identical")


def verify_onnx_file(model_path: Path, reference: nn.Module) -> None:
    """Cross-check the serialized graph when onnxruntime is installed."""
    try:
        import onnxruntime
    except ImportError:
        print("onnxruntime not installed; skipping serialized-graph probe", file=sys.stderr)
        return
    session = onnxruntime.InferenceSession(str(model_path), providers=["CPUExecutionProvider"])
    fixed = torch.linspace(0, 1, 3 * INPUT_SIZE * INPUT_SIZE).reshape(1, 3, INPUT_SIZE, INPUT_SIZE)
    feed = {session.get_inputs()[0].name: fixed.numpy()}
    (first,) = session.run(None, feed)
    (second,) = session.run(None, feed)
    if first.shape != (1, OUTPUT_DIM):
        raise ExportError(f"serialized graph emitted shape {first.shape}")
    if not (first == second).all():
        raise ExportError("serialized graph inference was not bit-identical")
    want = probe(reference, fixed).numpy()
    if abs(first - want).max() > 1e-4:
        raise ExportError("serialized graph disagrees with the torch module")


def export_model(
    out_dir: Path | str,
    pretrained: bool = True,
    opset: int = DEFAULT_OPSET,
) -> tuple[Path, Path]:
    """Write model.onnx plus model.json into ``out_dir`` and verify both.

    Returns:
        (model path, manifest path)

    Raises:
        ExportError: weight loading, serialization, or verification failed.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / MODEL_FILENAME
    manifest_path = out_dir / MANIFEST_FILENAME

    try:
        model = build_feature_extractor(pretrained=pretrained)
    except Exception as exc:
        raise ExportError(
            f"could not build the feature extractor ({exc}); "
            "use --random-init when pretrained weights cannot be downloaded"
        ) from exc
    verify_extractor(model)

    dummy = torch.zeros(1, 3, INPUT_SIZE, INPUT_SIZE)
    try:
        torch.onnx.export(
            model,
            dummy,
            str(model_path),
            input_names=["image"],
            output_names=["features"],
            opset_version=opset,
            dynamo=False,  # fixed-shape TorchScript export, no dynamic axes
        )
    except Exception as exc:
        raise ExportError(f"ONNX serialization failed: {exc}") from exc

    manifest_path.write_text(json.dumps(manifest_payload(opset), indent=2) + "\n", encoding="utf-8")
    verify_onnx_file(model_path, model)
    return model_path, manifest_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("exported"),
                        help="output directory for model.onnx and model.json")
    parser.add_argument("--random-init", action="store_true",
                        help="skip the pretrained-weight download (offline smoke export)")
    parser.add_argument("--opset", type=int, default=DEFAULT_OPSET)
    args = parser.parse_args(argv)
    try:
        model_path, manifest_path = export_model(
            args.out, pretrained=not args.random_init, opset=args.opset
        )
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {model_path} and {manifest_path}")
    print(f"use it via: motcom compute --model {model_path} ...")
    return 0


if __name__ == "__main__":
    sys.exit(main())
