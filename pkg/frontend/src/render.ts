/** Pure HTML renderers: every view is a function of the last API payload.
 *
 * Nothing here invents ledger data. Transaction ids, block hashes, and
 * heights appear in the output only when the input payload carried them.
 */

import type {
  BookingDetail,
  BookingResult,
  Flight,
  HistoryEvent,
  Metrics,
  NodesView,
  Receipt,
  TxRef,
  Verdict,
} from "./api.js";

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function refRows(refs: TxRef[]): string {
  const rows = refs.map(
    (ref) =>
      `<tr class="tx-ref"><td>${esc(ref.kind)}</td><td class="mono">${esc(ref.tx_id)}</td>` +
      `<td>height ${esc(ref.height)}</td></tr>`,
  );
  return `<table class="refs"><tbody>${rows.join("")}</tbody></table>`;
}

export function renderFlightsTable(flights: Flight[]): string {
  if (flights.length === 0) {
    return `<p class="empty">No flights match.</p>`;
  }
  const rows = flights.map(
    (f) =>
      `<tr data-flight="${esc(f.flight)}"><td>${esc(f.flight)}</td><td>${esc(f.route)}</td>` +
      `<td>t+${esc(f.departure_time)}</td><td>${esc(f.fare)}</td>` +
      `<td>${esc(f.free)} of ${esc(f.capacity)} free</td>` +
      `<td><button data-action="book" data-flight="${esc(f.flight)}">Book</button></td></tr>`,
  );
  return (
    `<table class="flights"><thead><tr><th>Flight</th><th>Route</th><th>Departs</th>` +
    `<th>Fare</th><th>Seats</th><th></th></tr></thead><tbody>${rows.join("")}</tbody></table>`
  );
}

export function renderConfirmation(booking: BookingResult): string {
  const seat = booking.seat ? `<p>Seat <strong>${esc(booking.seat)}</strong></p>` : "";
  const fare = booking.fare !== undefined ? `<p>Fare ${esc(booking.fare)}</p>` : "";
  return (
    `<div class="card confirmation" data-pnr="${esc(booking.pnr)}">` +
    `<h2>Booking ${esc(booking.status)}</h2>` +
    `<p>PNR <strong class="pnr">${esc(booking.pnr)}</strong></p>${seat}${fare}` +
    `<h3>Ledger record</h3>${refRows(booking.tx_refs)}</div>`
  );
}

export function renderCancelResult(result: BookingResult): string {
  return (
    `<div class="card cancel-result" data-pnr="${esc(result.pnr)}">` +
    `<h2>Booking ${esc(result.status)}</h2>` +
    `<p>Refund <strong class="refund">${esc(result.refund_amount ?? 0)}</strong></p>` +
    `<h3>Ledger record</h3>${refRows(result.tx_refs)}</div>`
  );
}

export function renderErrorBanner(error: { code: string; message: string }): string {
  return (
    `<div class="banner error" data-code="${esc(error.code)}">` +
    `<strong>${esc(error.code)}</strong> ${esc(error.message)}</div>`
  );
}

export function renderPendingBanner(message: string, pnr: string): string {
  return (
    `<div class="banner pending" data-pnr="${esc(pnr)}">${esc(message)} ` +
    `<button data-action="retry-payment" data-pnr="${esc(pnr)}">Retry payment</button></div>`
  );
}

export function renderDegradedBanner(message: string): string {
  return `<div class="banner degraded">Gateway unreachable: ${esc(message)}</div>`;
}

export function renderBookingDetail(detail: BookingDetail): string {
  const seat = detail.seat === null ? "unassigned" : detail.seat;
  return (
    `<div class="card booking-detail" data-pnr="${esc(detail.pnr)}">` +
    `<h2>${esc(detail.pnr)} · ${esc(detail.status)}</h2>` +
    `<p>${esc(detail.customer)} on ${esc(detail.flight)} (departs t+${esc(detail.departure_time)})</p>` +
    `<p>Seat ${esc(seat)} · fare ${esc(detail.fare)} · paid ${esc(detail.paid)} · refunded ${esc(detail.refunded)}</p>` +
    `</div>`
  );
}

export function renderHistoryTimeline(pnr: string, events: HistoryEvent[]): string {
  if (events.length === 0) {
    return `<p class="empty">No ledger events for ${esc(pnr)}.</p>`;
  }
  const rows = events.map(
    (ev) =>
      `<li class="event"><span class="kind">${esc(ev.kind)}</span>` +
      ` <span class="where">height ${esc(ev.height)}</span>` +
      ` <span class="mono block">${esc(ev.block_hash)}</span>` +
      ` <span class="mono tx">${esc(ev.tx_id)}</span></li>`,
  );
  return `<ol class="timeline" data-pnr="${esc(pnr)}">${rows.join("")}</ol>`;
}

export function renderVerifyBadge(verdict: Verdict): string {
  if (verdict.valid) {
    return (
      `<span class="badge ok">Ok · height ${esc(verdict.height)} · ` +
      `tip <span class="mono">${esc(verdict.tip_hash)}</span></span>`
    );
  }
  const detail = verdict.detail ? ` (${esc(verdict.detail)})` : "";
  return `<span class="badge invalid">Invalid at height ${esc(verdict.height)}: ${esc(verdict.reason)}${detail}</span>`;
}

export function renderTamperAlert(verdict: Verdict): string {
  if (verdict.valid) {
    return "";
  }
  return (
    `<div class="alert tamper" role="alert">Chain verification failed at height ` +
    `<strong>${esc(verdict.height)}</strong>: ${esc(verdict.reason)}` +
    ` <button data-action="ack-alert">Acknowledge</button></div>`
  );
}

export function renderNodeTiles(view: NodesView): string {
  const up = view.nodes.filter((n) => n.status === "Up").length;
  const tiles = view.nodes.map(
    (n) =>
      `<div class="tile ${n.status === "Up" ? "up" : "down"}" data-node="${esc(n.node_id)}">` +
      `<h3>${esc(n.node_id)}</h3><p class="status">${esc(n.status)}</p>` +
      `<p>height ${esc(n.height)}</p><p class="mono tip">${esc(n.tip_hash)}</p>` +
      `<p>up ${esc(n.up_ticks)} ticks</p></div>`,
  );
  const commits =
    up >= view.quorum
      ? `<p class="commits continue">commits continue (${up}/${view.nodes.length} up, quorum ${esc(view.quorum)})</p>`
      : `<p class="commits halted">commits halted (${up}/${view.nodes.length} up, quorum ${esc(view.quorum)})</p>`;
  return `<div class="nodes">${tiles.join("")}</div>${commits}`;
}

export function renderMetricsPanel(metrics: Metrics): string {
  const bookings = Object.entries(metrics.bookings)
    .map(([status, count]) => `<li>${esc(status)}: ${esc(count)}</li>`)
    .join("");
  return (
    `<dl class="metrics">` +
    `<dt>Committed fraction</dt><dd class="fraction">${esc(metrics.availability.committed_fraction)}</dd>` +
    `<dt>Chain height</dt><dd>${esc(metrics.availability.chain_height)}</dd>` +
    `<dt>Divergence</dt><dd class="divergence">${esc(metrics.divergence.mismatches)} mismatches</dd>` +
    `<dt>Money conserved</dt><dd class="conserved">${metrics.money.conserved ? "yes" : "NO"}</dd>` +
    `<dt>Safety violations</dt><dd>${esc(metrics.safety_violations)}</dd>` +
    `<dt>Bookings</dt><dd><ul>${bookings}</ul></dd>` +
    `</dl>`
  );
}

export function renderNotifications(receipts: Receipt[]): string {
  if (receipts.length === 0) {
    return `<p class="empty">No notifications.</p>`;
  }
  const rows = receipts.map((r) => {
    const body = r.message !== undefined ? r.message : (r.event ?? "");
    const detail = r.detail ? ` <span class="detail">${esc(r.detail)}</span>` : "";
    return `<li class="receipt">${esc(body)}${detail}</li>`;
  });
  return `<ul class="notifications">${rows.join("")}</ul>`;
}

export function renderLoginView(): string {
  return (
    `<form class="login" data-action="login">` +
    `<label>Role <select name="role"><option value="customer">customer</option>` +
    `<option value="admin">admin</option></select></label>` +
    `<label>Token <input name="token" type="password" autocomplete="off"></label>` +
    `<button type="submit">Sign in</button></form>`
  );
}
