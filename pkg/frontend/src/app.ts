// DOM wiring: renders the view-model into the static page and forwards
// clicks to it. Status polls every 500 ms; the event feed rides one SSE
// subscription.

import { ConsoleApi, EventRecord } from "./api.js";
import { ConsoleViewModel } from "./model.js";

const api = new ConsoleApi("");
const vm = new ConsoleViewModel(api);

const $ = (id: string) => document.getElementById(id)!;

function render(): void {
  $("clock").textContent = vm.simClock;
  const phase = $("phase");
  phase.textContent = vm.phase;
  phase.className = `chip phase-${vm.phase}`;

  const banner = $("banner");
  if (vm.banner) {
    banner.textContent = vm.banner.text;
    banner.className = `banner ${vm.banner.kind}`;
  } else {
    banner.textContent = "";
    banner.className = "banner hidden";
  }

  const target = vm.status?.target;
  $("target").textContent = target
    ? `${target.ssid} (${target.bssid}) ch ${target.channel}`
    : "none";

  const apBody = $("ap-rows");
  apBody.innerHTML = "";
  if (vm.apRows.length === 0) {
    apBody.innerHTML =
      '<tr><td colspan="4" class="empty">no access points - run a scan</td></tr>';
  }
  for (const ap of vm.apRows) {
    const row = document.createElement("tr");
    if (ap.bssid === vm.selectedBssid) row.className = "selected";
    row.innerHTML = `<td>${ap.ssid}</td><td class="mono">${ap.bssid}</td>` +
      `<td>${ap.channel}</td>`;
    const cell = document.createElement("td");
    const button = document.createElement("button");
    button.textContent = ap.bssid === vm.selectedBssid ? "selected" : "select";
    button.onclick = () => {
      vm.selectAp(ap.bssid);
      render();
    };
    cell.appendChild(button);
    row.appendChild(cell);
    apBody.appendChild(row);
  }

  const clientBody = $("client-rows");
  clientBody.innerHTML = "";
  for (const c of vm.clientRows) {
    const row = document.createElement("tr");
    row.innerHTML =
      `<td class="mono">${c.mac}</td>` +
      `<td><span class="dot ${c.connected ? "up" : "down"}"></span>` +
      `${c.connected ? "connected" : "disconnected"}</td>` +
      `<td>${c.downtimeS.toFixed(1)} s</td>`;
    clientBody.appendChild(row);
  }

  const botBody = $("bot-rows");
  botBody.innerHTML = "";
  for (const b of vm.botRows) {
    const row = document.createElement("tr");
    row.innerHTML = `<td class="mono">${b.mac}</td><td>${b.phase}</td>` +
      `<td>${b.framesSent}</td>`;
    botBody.appendChild(row);
  }
}

function renderFeed(event: EventRecord): void {
  vm.applyEvent(event);
  const feed = $("feed");
  const line = document.createElement("div");
  line.className = "feed-line";
  const t = (event.t_us / 1e6).toFixed(3);
  line.textContent = `${t}s  ${event.node}  ${event.kind}  ` +
    JSON.stringify(event.detail);
  feed.appendChild(line);
  while (feed.childElementCount > 250) feed.removeChild(feed.firstChild!);
  feed.scrollTop = feed.scrollHeight;
}

async function main(): Promise<void> {
  $("scan").onclick = async () => {
    await vm.scan();
    render();
  };
  $("attack").onclick = async () => {
    const duration = Number((($("duration") as HTMLInputElement)).value) || 30;
    await vm.attack(duration);
    render();
  };
  $("stop").onclick = async () => {
    await vm.stop();
    render();
  };

  await vm.refresh();
  render();
  setInterval(async () => {
    await vm.refresh();
    render();
  }, 500);
  void api.streamEvents(renderFeed).catch(() => {
    // stream drops when the server goes away; polling shows the failure
  });
}

void main();
