/**
 * Training entry point: loads an exported dataset, fits the classifier
 * and writes a model artifact plus a held-out metrics report into the
 * output directory.  The held-out numbers are informational; the trigger
 * is evaluated end to end by its consumer.
 */

import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import { classCounts, loadDatasetFile } from "./dataset";
import type { HeldOutReport } from "./model";
import { trainClassifier } from "./model";

export type TrainConfig = {
  datasetPath: string;
  learningRate: number;
  maxInputLen: number;
  epochs: number;
  seed: number;
  outputDir: string;
};

export const TRAIN_DEFAULTS = {
  learningRate: 5e-5,
  maxInputLen: 512,
  epochs: 3,
  seed: 0,
} as const;

export type TrainResult = {
  modelPath: string;
  reportPath: string;
  samples: number;
  positives: number;
  negatives: number;
  heldOut: HeldOutReport;
};

export function train(config: TrainConfig): TrainResult {
  const samples = loadDatasetFile(config.datasetPath);
  const { positives, negatives } = classCounts(samples);
  const { artifact, report } = trainClassifier(samples, config);

  mkdirSync(config.outputDir, { recursive: true });
  const modelPath = join(config.outputDir, "model.json");
  const reportPath = join(config.outputDir, "report.json");
  writeFileSync(modelPath, JSON.stringify(artifact));
  writeFileSync(
    reportPath,
    JSON.stringify(
      {
        dataset: config.datasetPath,
        samples: samples.length,
        positives,
        negatives,
        learningRate: config.learningRate,
        maxInputLen: config.maxInputLen,
        epochs: config.epochs,
        seed: config.seed,
        heldOut: report,
      },
      null,
      2,
    ) + "\n",
  );
  return {
    modelPath,
    reportPath,
    samples: samples.length,
    positives,
    negatives,
    heldOut: report,
  };
}
