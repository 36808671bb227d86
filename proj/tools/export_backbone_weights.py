#!/usr/bin/env python3
"""Export torchvision ResNet weights into the toolkit's named-tensor format.

Writes every backbone tensor (conv weights, batch-norm affine parameters and
running statistics) under its torchvision state-dict name; the classifier
head (`fc.*`) is skipped because the toolkit replaces it. The resulting file
plugs into `model.backbone_weights` in the experiment config or into a
checkpoint's `weights_ref` field.

Usage:
    python3 tools/export_backbone_weights.py resnet18 r18.advw [--pretrained]
"""

import argparse
import struct
import sys


def write_named_tensors(named, path):
    with open(path, "wb") as f:
        f.write(b"ADVWTS\x00\x00")
        f.write(struct.pack("<I", 1))
        f.write(struct.pack("<I", len(named)))
        for name, tensor in named:
            encoded = name.encode("utf-8")
            f.write(struct.pack("<I", len(encoded)))
            f.write(encoded)
            dims = list(tensor.shape) or [1]
            f.write(struct.pack("<I", len(dims)))
            for d in dims:
                f.write(struct.pack("<Q", d))
            f.write(tensor.detach().to("cpu").float().contiguous().numpy().tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("arch", choices=["resnet18", "resnet50"])
    parser.add_argument("output")
    parser.add_argument("--pretrained", action="store_true",
                        help="download and export the pretrained weights")
    args = parser.parse_args()

    try:
        import torchvision.models as models
    except ImportError:
        sys.exit("torchvision is required to export weights")

    weights = "DEFAULT" if args.pretrained else None
    model = getattr(models, args.arch)(weights=weights).eval()

    named = [(name, tensor) for name, tensor in model.state_dict().items()
             if not name.startswith("fc.") and "num_batches_tracked" not in name]
    write_named_tensors(named, args.output)
    print(f"wrote {len(named)} tensors to {args.output}")


if __name__ == "__main__":
    main()
