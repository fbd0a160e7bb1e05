/**
 * Seeded logistic regression over hashed prefix features.
 *
 * Training is plain SGD with a deterministic shuffle, so a fixed seed
 * reproduces the exact same weights and held-out predictions.  The saved
 * artifact is one JSON file; scoring is a pure function of the weights,
 * hence identical text always yields an identical score.
 */

import { readFileSync } from "fs";
import type { TriggerSample } from "./dataset";
import { classCounts } from "./dataset";
import { FEATURE_DIM, FEATURE_VERSION, featurize } from "./features";

export type ModelArtifact = {
  version: string;
  featureDim: number;
  maxInputLen: number;
  bias: number;
  weights: number[];
};

export type HeldOutReport = {
  size: number;
  accuracy: number;
  f1: number;
};

export type TrainOptions = {
  learningRate: number;
  maxInputLen: number;
  epochs: number;
  seed: number;
};

export type TrainOutput = {
  artifact: ModelArtifact;
  report: HeldOutReport;
  heldOutPredictions: number[];
};

// The configured rate is a transformer fine-tuning scale; raw count
// features need a step size near 1, so the default 5e-5 maps to 1.0.
const LEARNING_RATE_SCALE = 20_000;
const HELD_OUT_FRACTION = 0.1;

/** Small deterministic PRNG; good enough for shuffles, trivially portable. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function shuffled<T>(items: T[], random: () => number): T[] {
  const copy = items.slice();
  for (let i = copy.length - 1; i > 0; i--) {
    const j = Math.floor(random() * (i + 1));
    [copy[i], copy[j]] = [copy[j], copy[i]];
  }
  return copy;
}

function sigmoid(z: number): number {
  return z >= 0 ? 1 / (1 + Math.exp(-z)) : Math.exp(z) / (1 + Math.exp(z));
}

export class ScoringModel {
  readonly maxInputLen: number;
  private readonly weights: Float64Array;
  private readonly bias: number;
  private readonly artifact: ModelArtifact;

  constructor(artifact: ModelArtifact) {
    if (artifact.version !== FEATURE_VERSION) {
      throw new Error(
        `unsupported artifact version ${artifact.version}; expected ${FEATURE_VERSION}`,
      );
    }
    if (artifact.weights.length !== artifact.featureDim) {
      throw new Error(
        `artifact has ${artifact.weights.length} weights for dimension ${artifact.featureDim}`,
      );
    }
    this.artifact = artifact;
    this.maxInputLen = artifact.maxInputLen;
    this.weights = Float64Array.from(artifact.weights);
    this.bias = artifact.bias;
  }

  static fromFile(path: string): ScoringModel {
    let artifact: ModelArtifact;
    try {
      artifact = JSON.parse(readFileSync(path, "utf-8")) as ModelArtifact;
    } catch (error) {
      throw new Error(`cannot load model artifact ${path}: ${(error as Error).message}`);
    }
    return new ScoringModel(artifact);
  }

  toJSON(): ModelArtifact {
    return this.artifact;
  }

  score(text: string): number {
    let z = this.bias;
    for (const [index, count] of featurize(text, this.maxInputLen)) {
      z += this.weights[index] * count;
    }
    return sigmoid(z);
  }
}

/**
 * Fit the classifier on a balanced dataset.
 *
 * Refuses empty or unbalanced input (balancing belongs to the exporter).
 * Splits off a held-out slice, trains on the rest, and reports held-out
 * accuracy and positive-class F1; both are informational only.
 */
export function trainClassifier(
  samples: TriggerSample[],
  options: TrainOptions,
): TrainOutput {
  if (samples.length === 0) {
    throw new Error("dataset is empty: cannot train on 0 samples");
  }
  const { positives, negatives } = classCounts(samples);
  if (positives !== negatives) {
    throw new Error(
      `dataset is unbalanced: ${positives} positive vs ${negatives} negative ` +
        "samples; export with an exact 1:1 balance",
    );
  }

  const random = mulberry32(options.seed);
  const pool = shuffled(samples, random);
  const heldOutSize = Math.max(1, Math.floor(pool.length * HELD_OUT_FRACTION));
  const heldOut = pool.slice(0, heldOutSize);
  const training = pool.slice(heldOutSize);

  const weights = new Float64Array(FEATURE_DIM);
  let bias = 0;
  const featurized = training.map((sample) => ({
    label: sample.label,
    features: featurize(sample.text, options.maxInputLen),
  }));
  for (let epoch = 0; epoch < options.epochs; epoch++) {
    const rate = (options.learningRate * LEARNING_RATE_SCALE) / (1 + epoch);
    for (const example of shuffled(featurized, random)) {
      let z = bias;
      for (const [index, count] of example.features) {
        z += weights[index] * count;
      }
      const gradient = sigmoid(z) - example.label;
      for (const [index, count] of example.features) {
        weights[index] -= rate * gradient * count;
      }
      bias -= rate * gradient;
    }
  }

  const artifact: ModelArtifact = {
    version: FEATURE_VERSION,
    featureDim: FEATURE_DIM,
    maxInputLen: options.maxInputLen,
    bias,
    weights: Array.from(weights),
  };
  const model = new ScoringModel(artifact);

  const heldOutPredictions = heldOut.map((sample) =>
    model.score(sample.text) >= 0.5 ? 1 : 0,
  );
  let correct = 0;
  let tp = 0;
  let fp = 0;
  let fn = 0;
  heldOut.forEach((sample, i) => {
    const predicted = heldOutPredictions[i];
    if (predicted === sample.label) correct += 1;
    if (predicted === 1 && sample.label === 1) tp += 1;
    if (predicted === 1 && sample.label === 0) fp += 1;
    if (predicted === 0 && sample.label === 1) fn += 1;
  });
  const f1Denominator = 2 * tp + fp + fn;
  const report: HeldOutReport = {
    size: heldOut.length,
    accuracy: correct / heldOut.length,
    f1: f1Denominator === 0 ? 0 : (2 * tp) / f1Denominator,
  };
  return { artifact, report, heldOutPredictions };
}
