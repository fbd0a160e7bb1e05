/**
 * Reader for the line-delimited trigger-dataset export format.
 *
 * One JSON object per line: {"text": string, "label": 0|1, "source_id":
 * string}.  Files are consumed verbatim as exported; malformed lines are
 * reported with their line number.
 */

import { readFileSync } from "fs";

export type TriggerSample = {
  text: string;
  label: 0 | 1;
  sourceId: string;
};

export function parseDataset(content: string): TriggerSample[] {
  const samples: TriggerSample[] = [];
  const lines = content.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let record: Record<string, unknown>;
    try {
      record = JSON.parse(line) as Record<string, unknown>;
    } catch (error) {
      throw new Error(`line ${i + 1}: not valid JSON (${(error as Error).message})`);
    }
    const { text, label } = record;
    if (typeof text !== "string") {
      throw new Error(`line ${i + 1}: "text" must be a string`);
    }
    if (label !== 0 && label !== 1) {
      throw new Error(`line ${i + 1}: "label" must be 0 or 1`);
    }
    const sourceId = record["source_id"];
    samples.push({
      text,
      label,
      sourceId: typeof sourceId === "string" ? sourceId : "",
    });
  }
  return samples;
}

export function loadDatasetFile(path: string): TriggerSample[] {
  return parseDataset(readFileSync(path, "utf-8"));
}

export function classCounts(samples: TriggerSample[]): {
  positives: number;
  negatives: number;
} {
  let positives = 0;
  for (const sample of samples) {
    if (sample.label === 1) positives += 1;
  }
  return { positives, negatives: samples.length - positives };
}
