// View-model for the operator console. Every displayed value is derived
// from the latest /api/status snapshot plus the /api/events stream; nothing
// is invented client-side. The DOM layer just renders this object.

import { ApiError, ConsoleApi, EventRecord, Status } from "./api.js";

export type Banner = { kind: "error" | "info"; text: string } | null;

export class ConsoleViewModel {
  status: Status | null = null;
  selectedBssid: string | null = null;
  events: EventRecord[] = [];
  banner: Banner = null;
  scanning = false;

  constructor(
    private readonly api: ConsoleApi,
    private readonly feedLimit = 250,
  ) {}

  applyStatus(status: Status): void {
    this.status = status;
    if (
      this.selectedBssid !== null &&
      !status.aps.some((ap) => ap.bssid === this.selectedBssid)
    ) {
      this.selectedBssid = null; // target vanished from the inventory
    }
  }

  applyEvent(event: EventRecord): void {
    this.events.push(event);
    if (this.events.length > this.feedLimit) {
      this.events.splice(0, this.events.length - this.feedLimit);
    }
  }

  async refresh(): Promise<void> {
    try {
      this.applyStatus(await this.api.status());
      if (this.banner?.kind === "error") this.banner = null;
    } catch (err) {
      this.banner = { kind: "error", text: describe(err) };
    }
  }

  async scan(): Promise<void> {
    this.scanning = true;
    try {
      await this.api.scan();
      this.banner = { kind: "info", text: "scan requested" };
    } catch (err) {
      this.banner = { kind: "error", text: describe(err) };
    } finally {
      this.scanning = false;
    }
    await this.refresh();
  }

  selectAp(bssid: string): void {
    if (this.status?.aps.some((ap) => ap.bssid === bssid)) {
      this.selectedBssid = bssid;
    }
  }

  async attack(durationS: number): Promise<boolean> {
    if (this.selectedBssid === null) {
      this.banner = { kind: "error", text: "select an access point first" };
      return false;
    }
    try {
      await this.api.attack(this.selectedBssid, durationS);
      this.banner = { kind: "info", text: `attack dispatched (${durationS}s)` };
    } catch (err) {
      this.banner = { kind: "error", text: describe(err) };
      return false;
    }
    await this.refresh();
    return true;
  }

  async stop(): Promise<void> {
    try {
      await this.api.stop();
      this.banner = { kind: "info", text: "stop requested" };
    } catch (err) {
      this.banner = { kind: "error", text: describe(err) };
    }
    await this.refresh();
  }

  get apRows() {
    return this.status?.aps ?? [];
  }

  get clientRows() {
    return (this.status?.clients ?? []).map((c) => ({
      mac: c.mac,
      connected: c.connected,
      downtimeS: Math.round(c.downtime_s * 10) / 10,
    }));
  }

  get botRows() {
    return (this.status?.bots ?? []).map((b) => ({
      mac: b.mac,
      phase: b.phase,
      framesSent: b.frames_sent,
    }));
  }

  get phase(): string {
    return this.status?.phase ?? "unknown";
  }

  get simClock(): string {
    const t = this.status?.sim_time_s ?? 0;
    return `${t.toFixed(2)} s`;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.status}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
