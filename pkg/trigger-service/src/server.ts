/**
 * HTTP scoring service.
 *
 * POST /score {"text": ...} -> {"score": s} with s in [0, 1].
 * GET /health -> 200 once the model is loaded.
 * GET /bench -> p50 scoring latency over repeated full-length inputs.
 *
 * Malformed bodies get 400 with a message; a scoring failure is a 500.
 * Model weights are read-only after load, so requests are safe to serve
 * concurrently, and identical text always yields an identical score.
 */

import express, { type NextFunction, type Request, type Response } from "express";
import type { Server } from "http";

export const SERVICE_VERSION = "0.1.0";

export type Scorer = {
  maxInputLen: number;
  score(text: string): number;
};

function benchInput(tokens: number): string {
  const words: string[] = [];
  for (let i = 0; i < tokens - 1; i++) {
    words.push(i % 7 === 6 ? `word${i},` : `word${i}`);
  }
  words.push("done.");
  return words.join(" ");
}

export function createApp(model: Scorer): express.Express {
  const app = express();
  app.use(express.json({ limit: "1mb" }));

  app.get("/health", (_req: Request, res: Response) => {
    res.json({ status: "ok", version: SERVICE_VERSION });
  });

  app.post("/score", (req: Request, res: Response) => {
    const body = req.body as { text?: unknown } | undefined;
    if (!body || typeof body.text !== "string") {
      res.status(400).json({ error: 'body must be JSON with a string "text" field' });
      return;
    }
    try {
      res.json({ score: model.score(body.text) });
    } catch (error) {
      res.status(500).json({ error: `scoring failed: ${(error as Error).message}` });
    }
  });

  app.get("/bench", (req: Request, res: Response) => {
    const requested = Number(req.query.n ?? 200);
    const n = Math.min(Math.max(Number.isFinite(requested) ? Math.floor(requested) : 200, 1), 2000);
    const input = benchInput(model.maxInputLen);
    try {
      for (let i = 0; i < 10; i++) model.score(input);
      const durations: number[] = [];
      for (let i = 0; i < n; i++) {
        const started = process.hrtime.bigint();
        model.score(input);
        durations.push(Number(process.hrtime.bigint() - started) / 1e6);
      }
      durations.sort((a, b) => a - b);
      res.json({
        p50Ms: durations[Math.floor((durations.length - 1) / 2)],
        n,
        tokens: model.maxInputLen,
      });
    } catch (error) {
      res.status(500).json({ error: `scoring failed: ${(error as Error).message}` });
    }
  });

  // Body-parser rejections (bad JSON, oversize) carry a 4xx status; anything
  // else reaching here is a genuine server fault.
  app.use((error: Error & { status?: number }, _req: Request, res: Response, _next: NextFunction) => {
    if (error.status && error.status >= 400 && error.status < 500) {
      res.status(400).json({ error: `malformed body: ${error.message}` });
    } else {
      res.status(500).json({ error: error.message });
    }
  });

  return app;
}

export function startServer(
  app: express.Express,
  host: string,
  port: number,
): Promise<Server> {
  return new Promise((resolve, reject) => {
    const server = app.listen(port, host);
    server.once("listening", () => resolve(server));
    server.once("error", reject);
  });
}
