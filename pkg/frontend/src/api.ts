// Typed client for the simulator's control API. Works in the browser and in
// Node 20+ (fetch + web streams), so the test driver exercises the exact
// code the page runs.

export interface ApRow {
  ssid: string;
  bssid: string;
  channel: number;
}

export interface TargetInfo {
  bssid: string;
  ssid: string;
  channel: number;
}

export interface ClientRow {
  mac: string;
  connected: boolean;
  bssid: string | null;
  downtime_s: number;
}

export interface BotRow {
  mac: string;
  phase: string;
  frames_sent: number;
}

export interface Status {
  sim_time_us: number;
  sim_time_s: number;
  phase: string;
  scanned: boolean;
  target: TargetInfo | null;
  aps: ApRow[];
  clients: ClientRow[];
  bots: BotRow[];
}

export interface EventRecord {
  t_us: number;
  seq: number;
  node: string;
  kind: string;
  detail: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response;
}

export interface StreamOptions {
  fromSeq?: number;
  limit?: number;
  signal?: AbortSignal;
}

export class ConsoleApi {
  constructor(readonly base: string = "") {}

  async status(): Promise<Status> {
    const response = await expectOk(await fetch(`${this.base}/api/status`));
    return (await response.json()) as Status;
  }

  async aps(): Promise<ApRow[]> {
    const response = await expectOk(await fetch(`${this.base}/api/aps`));
    return (await response.json()) as ApRow[];
  }

  async scan(): Promise<void> {
    await expectOk(await fetch(`${this.base}/api/scan`, { method: "POST" }));
  }

  async attack(bssid: string, durationS: number): Promise<void> {
    await expectOk(
      await fetch(`${this.base}/api/attack`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ bssid, duration_s: durationS }),
      }),
    );
  }

  async stop(): Promise<void> {
    await expectOk(await fetch(`${this.base}/api/stop`, { method: "POST" }));
  }

  // Server-sent event reader; resolves when the stream ends or is aborted.
  async streamEvents(
    onEvent: (event: EventRecord) => void,
    opts: StreamOptions = {},
  ): Promise<void> {
    const params = new URLSearchParams();
    if (opts.fromSeq !== undefined) params.set("from_seq", String(opts.fromSeq));
    if (opts.limit !== undefined) params.set("limit", String(opts.limit));
    const query = params.toString() ? `?${params.toString()}` : "";
    let response: Response;
    try {
      response = await expectOk(
        await fetch(`${this.base}/api/events${query}`, { signal: opts.signal }),
      );
    } catch (err) {
      if (opts.signal?.aborted) return;
      throw err;
    }
    if (!response.body) return;
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let cut;
        while ((cut = buffer.indexOf("\n\n")) >= 0) {
          const chunk = buffer.slice(0, cut);
          buffer = buffer.slice(cut + 2);
          for (const line of chunk.split("\n")) {
            if (line.startsWith("data: ")) {
              onEvent(JSON.parse(line.slice("data: ".length)) as EventRecord);
            }
          }
        }
      }
    } catch (err) {
      if (!opts.signal?.aborted) throw err;
    }
  }
}
