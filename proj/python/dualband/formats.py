# SPDX-License-Identifier: Apache-2.0
"""Pure-numpy readers/writers for the dataset container and model packages.

Dataset file: b"DBCEDATA", u32 little-endian header length, JSON header, then
``count * record_floats`` little-endian float32 values.

Model package: JSON manifest plus a float32 blob named in ``manifest["blob"]``; conv layers
store weight [out, in, k, k] then bias, batchnorm layers gamma, beta, mean, variance.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"DBCEDATA"
MODEL_FORMAT = "dualband-model"


def read_dataset(path):
    """Returns (header dict, float32 array of shape (count, record_floats))."""
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: bad magic")
    (hlen,) = struct.unpack_from("<I", raw, 8)
    header = json.loads(raw[12 : 12 + hlen].decode("utf-8"))
    body = np.frombuffer(raw, dtype="<f4", offset=12 + hlen)
    count, stride = header["count"], header["record_floats"]
    if body.size != count * stride:
        raise ValueError(f"{path}: expected {count * stride} floats, found {body.size}")
    return header, body.reshape(count, stride).astype(np.float32)


def write_dataset(path, header, records):
    records = np.ascontiguousarray(records, dtype="<f4")
    header = dict(header, count=int(records.shape[0]), record_floats=int(records.shape[1]))
    text = json.dumps(header).encode("utf-8")
    Path(path).write_bytes(MAGIC + struct.pack("<I", len(text)) + text + records.tobytes())


def split_sample(record, rows, cols):
    """Unpacks one samples-kind record into named complex matrices and scalars."""
    plane = rows * cols
    r = np.asarray(record, dtype=np.float64)

    def cmat(k):
        return (r[2 * k * plane : (2 * k + 1) * plane] + 1j * r[(2 * k + 1) * plane : (2 * k + 2) * plane]).reshape(
            rows, cols
        )

    # inband, oob, two constant planes (raw K estimate, noise variance), target, K, SNR
    return {
        "inband": cmat(0),
        "oob": cmat(1),
        "k_estimate": float(r[4 * plane]),
        "noise_variance": float(r[5 * plane]),
        "target": cmat(3),
        "k_true": r[8 * plane],
        "snr_true": r[8 * plane + 1],
    }


@dataclass
class Layer:
    kind: str
    spec: dict
    params: dict = field(default_factory=dict)


@dataclass
class ModelPackage:
    manifest: dict
    layers: list

    @property
    def input_scale(self):
        return self.manifest["input_scale"]

    @property
    def output_scale(self):
        return self.manifest["output_scale"]


def load_model_package(manifest_path):
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format") != MODEL_FORMAT:
        raise ValueError(f"{manifest_path}: not a {MODEL_FORMAT} manifest")
    raw = (manifest_path.parent / manifest["blob"]).read_bytes()
    if "crc32:%08x" % zlib.crc32(raw) != manifest["checksum"]:
        raise ValueError(f"{manifest_path}: blob checksum mismatch")
    blob = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    layers = []
    for spec in manifest["layers"]:
        layer = Layer(spec["kind"], spec)
        if spec["kind"] == "conv":
            o, i, k = spec["out_channels"], spec["in_channels"], spec["kernel"]
            at = spec["offset"]
            layer.params["weight"] = blob[at : at + o * i * k * k].reshape(o, i, k, k)
            layer.params["bias"] = blob[at + o * i * k * k : at + o * i * k * k + o]
        elif spec["kind"] == "batchnorm":
            c, at = spec["channels"], spec["offset"]
            for n, name in enumerate(("gamma", "beta", "mean", "variance")):
                layer.params[name] = blob[at + n * c : at + (n + 1) * c]
        layers.append(layer)
    return ModelPackage(manifest, layers)


def save_model_package(package, manifest_path):
    """Writes manifest and blob; offsets and checksum are recomputed from the parameters."""
    manifest_path = Path(manifest_path)
    chunks, offset, specs = [], 0, []
    for layer in package.layers:
        spec = dict(layer.spec, kind=layer.kind)
        if layer.kind == "conv":
            names = ("weight", "bias")
        elif layer.kind == "batchnorm":
            names = ("gamma", "beta", "mean", "variance")
        else:
            names = ()
        if names:
            spec["offset"] = offset
            for n in names:
                flat = np.asarray(layer.params[n], dtype=np.float64).ravel()
                chunks.append(flat)
                offset += flat.size
        specs.append(spec)
    blob = (np.concatenate(chunks) if chunks else np.zeros(0)).astype("<f4").tobytes()
    blob_name = manifest_path.stem + ".bin"
    manifest = dict(package.manifest, blob=blob_name, blob_floats=offset, layers=specs)
    manifest["checksum"] = "crc32:%08x" % zlib.crc32(blob)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    (manifest_path.parent / blob_name).write_bytes(blob)
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")


def _conv(x, w, b, pad):
    c, h, wd = x.shape
    o, _, k, _ = w.shape
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    oh, ow = h + 2 * pad - k + 1, wd + 2 * pad - k + 1
    out = np.empty((o, oh, ow))
    for i in range(oh):
        for j in range(ow):
            out[:, i, j] = np.tensordot(w, xp[:, i : i + k, j : j + k], axes=3)
    return out + b[:, None, None]


def reference_forward(package, x):
    """Raw (2, rows, cols) network output for a (C, rows, cols) input; batchnorm in inference mode."""
    outputs = []
    cur = np.asarray(x, dtype=np.float64)
    for layer in package.layers:
        p, kind = layer.params, layer.kind
        if kind == "conv":
            cur = _conv(cur, p["weight"], p["bias"], layer.spec["padding"])
        elif kind == "batchnorm":
            scale = p["gamma"] / np.sqrt(p["variance"] + layer.spec["epsilon"])
            cur = cur * scale[:, None, None] + (p["beta"] - scale * p["mean"])[:, None, None]
        elif kind == "relu":
            cur = np.maximum(cur, 0.0)
        elif kind == "tanh":
            cur = np.tanh(cur)
        elif kind == "maxpool2":
            c, h, w = cur.shape
            cur = cur.reshape(c, h // 2, 2, w // 2, 2).max(axis=(2, 4))
        elif kind == "upsample2":
            cur = cur.repeat(2, axis=1).repeat(2, axis=2)
        elif kind == "concat_skip":
            cur = np.concatenate([cur, outputs[layer.spec["source"]]], axis=0)
        else:
            raise ValueError(f"unknown layer kind {kind!r}")
        outputs.append(cur)
    return cur


def reference_estimate(package, x):
    y = reference_forward(package, x) * package.output_scale
    return y[0] + 1j * y[1]
