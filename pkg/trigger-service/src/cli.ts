#!/usr/bin/env node
/**
 * Command-line entry points.
 *
 *   trigger-service train --dataset data.jsonl --output-dir out/
 *   trigger-service serve --model out/model.json --port 8100
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { ScoringModel } from "./model";
import { createApp, startServer } from "./server";
import { TRAIN_DEFAULTS, train } from "./train";

function fail(error: unknown): never {
  console.error((error as Error).message ?? String(error));
  process.exit(1);
}

void yargs(hideBin(process.argv))
  .command(
    "train",
    "fit the classifier on an exported trigger dataset",
    (args) =>
      args
        .option("dataset", { type: "string", demandOption: true, describe: "dataset JSONL path" })
        .option("learning-rate", { type: "number", default: TRAIN_DEFAULTS.learningRate })
        .option("max-input-len", { type: "number", default: TRAIN_DEFAULTS.maxInputLen })
        .option("epochs", { type: "number", default: TRAIN_DEFAULTS.epochs })
        .option("seed", { type: "number", default: TRAIN_DEFAULTS.seed })
        .option("output-dir", { type: "string", demandOption: true, describe: "artifact directory" }),
    (argv) => {
      try {
        const result = train({
          datasetPath: argv.dataset,
          learningRate: argv["learning-rate"],
          maxInputLen: argv["max-input-len"],
          epochs: argv.epochs,
          seed: argv.seed,
          outputDir: argv["output-dir"],
        });
        console.log(
          `trained on ${result.samples} samples ` +
            `(${result.positives} positive, ${result.negatives} negative)`,
        );
        console.log(
          `held-out accuracy ${result.heldOut.accuracy.toFixed(3)} ` +
            `f1 ${result.heldOut.f1.toFixed(3)} over ${result.heldOut.size} samples`,
        );
        console.log(`wrote ${result.modelPath} and ${result.reportPath}`);
      } catch (error) {
        fail(error);
      }
    },
  )
  .command(
    "serve",
    "serve saturation scores from a trained artifact",
    (args) =>
      args
        .option("model", { type: "string", demandOption: true, describe: "model.json path" })
        .option("host", { type: "string", default: "127.0.0.1" })
        .option("port", { type: "number", default: 8100 }),
    async (argv) => {
      try {
        const model = ScoringModel.fromFile(argv.model);
        await startServer(createApp(model), argv.host, argv.port);
        console.log(`scoring service listening on http://${argv.host}:${argv.port}`);
      } catch (error) {
        fail(error);
      }
    },
  )
  .demandCommand(1, "specify a command: train or serve")
  .strict()
  .help()
  .parse();
