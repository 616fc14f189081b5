/** Browser entry point: wires the gateway client and renderers to the DOM. */

import { GatewayClient, GatewayError, type BookingResult, type JsonFetch, type Verdict } from "./api.js";
import { readConfig } from "./config.js";
import { startPoller, type Poller } from "./poll.js";
import {
  renderBookingDetail,
  renderCancelResult,
  renderConfirmation,
  renderDegradedBanner,
  renderErrorBanner,
  renderFlightsTable,
  renderHistoryTimeline,
  renderLoginView,
  renderMetricsPanel,
  renderNodeTiles,
  renderNotifications,
  renderPendingBanner,
  renderTamperAlert,
  renderVerifyBadge,
} from "./render.js";

declare global {
  interface Window {
    LEDGERAIR_CONSOLE?: { baseUrl?: string; pollMs?: number };
  }
}

const config = readConfig(window.LEDGERAIR_CONSOLE);

const browserFetch: JsonFetch = async (url, init) => {
  const response = await fetch(url, init);
  return { status: response.status, json: () => response.json() };
};

interface Session {
  role: "customer" | "admin";
  client: GatewayClient;
}

let session: Session | null = null;
const pollers: Poller[] = [];
let alertAcknowledged = false;
let lastVerdict: Verdict | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

function stopPollers(): void {
  while (pollers.length > 0) {
    pollers.pop()?.stop();
  }
}

function showError(target: HTMLElement, err: unknown): void {
  if (err instanceof GatewayError && err.code === "UNREACHABLE") {
    target.innerHTML = renderDegradedBanner(err.message);
  } else if (err instanceof GatewayError) {
    target.innerHTML = renderErrorBanner({ code: err.code, message: err.message });
  } else {
    target.innerHTML = renderErrorBanner({ code: "CLIENT", message: String(err) });
  }
}

function showBookingOutcome(result: BookingResult): void {
  el("booking-outcome").innerHTML = renderConfirmation(result);
  void refreshDetail(result.pnr);
}

async function refreshDetail(pnr: string): Promise<void> {
  if (!session) return;
  const panel = el("booking-panel");
  try {
    const detail = await session.client.getBooking(pnr);
    const history = await session.client.getHistory(pnr);
    const receipts = await session.client.getNotifications(pnr);
    panel.innerHTML =
      renderBookingDetail(detail) +
      renderHistoryTimeline(history.pnr, history.events) +
      renderNotifications(receipts) +
      `<button data-action="verify">Verify chain</button>` +
      `<button data-action="cancel" data-pnr="${pnr}">Cancel booking</button>` +
      `<span id="verify-slot"></span>`;
  } catch (err) {
    showError(panel, err);
  }
}

async function refreshFlights(): Promise<void> {
  if (!session) return;
  const route = (el("route-filter") as HTMLInputElement).value.trim();
  const flights = await session.client.listFlights(route ? { route } : undefined);
  el("flights").innerHTML = renderFlightsTable(flights);
}

async function bookFlight(flight: string): Promise<void> {
  if (!session) return;
  const customer = (el("customer-name") as HTMLInputElement).value.trim() || "walk-up";
  const method = (el("payment-method") as HTMLSelectElement).value;
  const outcome = el("booking-outcome");
  try {
    const result = await session.client.createBooking({ customer, flight, payment_method: method });
    showBookingOutcome(result);
  } catch (err) {
    if (err instanceof GatewayError && err.code === "GATEWAY_TIMEOUT") {
      const pnr = /booking (\S+) remains Pending/.exec(err.message)?.[1] ?? "";
      outcome.innerHTML = renderPendingBanner(err.message, pnr);
    } else {
      showError(outcome, err);
    }
  }
  void refreshFlights();
}

function startCustomerView(): void {
  el("app").innerHTML =
    `<section id="flight-search"><h2>Flights</h2>` +
    `<input id="route-filter" placeholder="route e.g. DAC-CGP">` +
    `<input id="customer-name" placeholder="passenger name">` +
    `<select id="payment-method"><option>card</option><option>mobile</option><option>cash</option></select>` +
    `<button data-action="search">Search</button>` +
    `<div id="flights"></div></section>` +
    `<section><div id="booking-outcome"></div><div id="booking-panel"></div></section>` +
    `<section><h2>Look up booking</h2><input id="pnr-lookup" placeholder="PNR">` +
    `<button data-action="lookup">Open</button></section>`;
  void refreshFlights();
}

function startAdminView(): void {
  el("app").innerHTML =
    `<section><h2>Cluster</h2><div id="nodes"></div></section>` +
    `<section><h2>Metrics</h2><div id="metrics"></div></section>` +
    `<section><h2>Chain</h2><div id="verify-slot"></div><div id="alert-slot"></div></section>` +
    `<div id="admin-banner"></div>`;
  if (!session) return;
  const client = session.client;
  pollers.push(
    startPoller(
      async () => {
        const view = await client.adminNodes();
        el("nodes").innerHTML = renderNodeTiles(view);
        el("admin-banner").innerHTML = "";
      },
      config.pollMs,
      (err) => showError(el("admin-banner"), err),
    ),
    startPoller(
      async () => {
        const metrics = await client.adminMetrics();
        el("metrics").innerHTML = renderMetricsPanel(metrics);
      },
      config.pollMs,
      (err) => showError(el("admin-banner"), err),
    ),
    startPoller(
      async () => {
        const verdict = await client.verifyChain();
        lastVerdict = verdict;
        el("verify-slot").innerHTML = renderVerifyBadge(verdict);
        if (verdict.valid) {
          alertAcknowledged = false;
        }
        if (!verdict.valid && !alertAcknowledged) {
          el("alert-slot").innerHTML = renderTamperAlert(verdict);
        }
      },
      config.pollMs,
      (err) => showError(el("admin-banner"), err),
    ),
  );
}

function login(role: "customer" | "admin", token: string): void {
  session = { role, client: new GatewayClient({ baseUrl: config.baseUrl, token }, browserFetch) };
  stopPollers();
  if (role === "admin") {
    startAdminView();
  } else {
    startCustomerView();
  }
}

function onClick(event: Event): void {
  const target = event.target as HTMLElement;
  const action = target.dataset["action"];
  if (!action || !session) return;
  if (action === "book" && target.dataset["flight"]) {
    void bookFlight(target.dataset["flight"]);
  } else if (action === "search") {
    void refreshFlights();
  } else if (action === "retry-payment" && target.dataset["pnr"]) {
    void session.client
      .retryPayment(target.dataset["pnr"])
      .then(showBookingOutcome)
      .catch((err) => showError(el("booking-outcome"), err));
  } else if (action === "lookup") {
    void refreshDetail((el("pnr-lookup") as HTMLInputElement).value.trim());
  } else if (action === "cancel" && target.dataset["pnr"]) {
    const pnr = target.dataset["pnr"];
    void session.client
      .cancelBooking(pnr, "cancelled from console")
      .then((result) => {
        el("booking-outcome").innerHTML = renderCancelResult(result);
        void refreshDetail(pnr);
      })
      .catch((err) => showError(el("booking-outcome"), err));
  } else if (action === "verify") {
    void session.client.verifyChain().then((verdict) => {
      const slot = document.getElementById("verify-slot");
      if (slot) slot.innerHTML = renderVerifyBadge(verdict);
    });
  } else if (action === "ack-alert") {
    alertAcknowledged = true;
    el("alert-slot").innerHTML = lastVerdict ? renderVerifyBadge(lastVerdict) : "";
  }
}

function onSubmit(event: Event): void {
  const form = event.target as HTMLFormElement;
  if (form.dataset["action"] !== "login") return;
  event.preventDefault();
  const data = new FormData(form);
  const role = data.get("role") === "admin" ? "admin" : "customer";
  login(role, String(data.get("token") ?? ""));
}

function boot(): void {
  el("app").innerHTML = renderLoginView();
  document.addEventListener("click", onClick);
  document.addEventListener("submit", onSubmit);
}

boot();
