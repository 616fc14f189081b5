/** Contract tests: rendered views show exactly what the gateway sent. */

import { describe, expect, it } from "vitest";

import type {
  BookingDetail,
  BookingResult,
  Flight,
  History,
  Metrics,
  NodesView,
  Receipt,
  Verdict,
} from "../src/api.js";
import {
  renderBookingDetail,
  renderCancelResult,
  renderConfirmation,
  renderErrorBanner,
  renderFlightsTable,
  renderHistoryTimeline,
  renderMetricsPanel,
  renderNodeTiles,
  renderNotifications,
  renderPendingBanner,
  renderTamperAlert,
  renderVerifyBadge,
} from "../src/render.js";
import { hexRefs, recordedData, recordedError } from "./recording.js";

function expectNoFabricatedRefs(html: string, payload: unknown): void {
  const allowed = hexRefs(payload);
  for (const ref of hexRefs(html)) {
    expect(allowed, `rendered ${ref} absent from the API payload`).toContain(ref);
  }
}

describe("booking confirmation", () => {
  const booking = recordedData<BookingResult>("booking_confirmed");

  it("shows pnr, seat, fare, and every ledger ref from the payload", () => {
    const html = renderConfirmation(booking);
    expect(html).toContain(booking.pnr);
    expect(html).toContain(String(booking.seat));
    expect(html).toContain(String(booking.fare));
    for (const ref of booking.tx_refs) {
      expect(html).toContain(ref.kind);
      expect(html).toContain(ref.tx_id);
      expect(html).toContain(`height ${ref.height}`);
    }
  });

  it("carries both saga steps (payment capture and ticket issue)", () => {
    expect(booking.tx_refs.map((r) => r.kind)).toEqual(["PaymentCaptured", "TicketIssued"]);
  });

  it("never renders a chain reference the API did not send", () => {
    expectNoFabricatedRefs(renderConfirmation(booking), booking);
  });
});

describe("rejection banner", () => {
  const rejection = recordedError("booking_rejected");

  it("renders the contract's reason verbatim with its detail", () => {
    const html = renderErrorBanner(rejection);
    expect(rejection.message).toContain("Conditions not met for contract execution");
    expect(rejection.message).toContain("SeatUnavailable");
    expect(html).toContain("Conditions not met for contract execution");
    expect(html).toContain("SeatUnavailable");
    expect(html).toContain(rejection.code);
  });

  it("escapes markup instead of executing it", () => {
    const html = renderErrorBanner({ code: "X", message: "<script>alert(1)</script>" });
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("pending payment banner", () => {
  const pending = recordedError("booking_pending");

  it("repeats the gateway message naming the pending pnr", () => {
    const pnr = /booking (\S+) remains Pending/.exec(pending.message)?.[1] ?? "";
    expect(pnr).not.toBe("");
    const html = renderPendingBanner(pending.message, pnr);
    expect(html).toContain(pending.message);
    expect(html).toContain(`data-pnr="${pnr}"`);
    expect(html).toContain("retry-payment");
  });
});

describe("cancellation", () => {
  const cancel = recordedData<BookingResult>("cancel_refund");

  it("displays exactly the API refund amount", () => {
    const html = renderCancelResult(cancel);
    expect(html).toContain(`>${cancel.refund_amount}<`);
    expect(html).toContain(cancel.status);
  });

  it("lists the cancellation and refund ledger refs", () => {
    const html = renderCancelResult(cancel);
    expect(cancel.tx_refs.map((r) => r.kind)).toEqual(["BookingCancelled", "RefundIssued"]);
    for (const ref of cancel.tx_refs) {
      expect(html).toContain(ref.tx_id);
    }
    expectNoFabricatedRefs(html, cancel);
  });
});

describe("history timeline", () => {
  const history = recordedData<History>("history_four");

  it("renders all four lifecycle events in chain order", () => {
    const html = renderHistoryTimeline(history.pnr, history.events);
    expect(history.events.map((e) => e.kind)).toEqual([
      "PaymentCaptured",
      "TicketIssued",
      "BookingCancelled",
      "RefundIssued",
    ]);
    const heights = history.events.map((e) => e.height);
    expect([...heights].sort((a, b) => a - b)).toEqual(heights);
    let cursor = -1;
    for (const event of history.events) {
      const where = html.indexOf(event.tx_id);
      expect(where).toBeGreaterThan(cursor);
      cursor = where;
      expect(html).toContain(event.block_hash);
      expect(html).toContain(`height ${event.height}`);
    }
  });

  it("fabricates nothing", () => {
    expectNoFabricatedRefs(renderHistoryTimeline(history.pnr, history.events), history);
  });

  it("shows an empty state for an unknown pnr", () => {
    const html = renderHistoryTimeline("PZZZZZ", []);
    expect(html).toContain("No ledger events");
    expect(hexRefs(html).size).toBe(0);
  });
});

describe("verify badge", () => {
  it("healthy chain gets the Ok badge with height and tip", () => {
    const verdict = recordedData<Verdict>("verify_ok");
    expect(verdict.valid).toBe(true);
    const html = renderVerifyBadge(verdict);
    expect(html).toContain(`class="badge ok"`);
    expect(html).toContain(`height ${verdict.height}`);
    expect(html).toContain(verdict.tip_hash);
    expectNoFabricatedRefs(html, verdict);
  });

  it("tampered chain gets the Invalid badge naming the failing height", () => {
    const verdict = recordedData<Verdict>("verify_invalid");
    expect(verdict.valid).toBe(false);
    const html = renderVerifyBadge(verdict);
    expect(html).toContain(`class="badge invalid"`);
    expect(html).toContain(`Invalid at height ${verdict.height}`);
    expect(html).toContain(verdict.reason);
  });

  it("tamper verdict raises the persistent alert; a valid one does not", () => {
    const bad = recordedData<Verdict>("verify_invalid");
    const alert = renderTamperAlert(bad);
    expect(alert).toContain("role=\"alert\"");
    expect(alert).toContain(`<strong>${bad.height}</strong>`);
    expect(alert).toContain("ack-alert");
    expect(renderTamperAlert(recordedData<Verdict>("verify_ok"))).toBe("");
  });
});

describe("node tiles", () => {
  it("four Up nodes render four green tiles sharing one tip hash", () => {
    const view = recordedData<NodesView>("admin_nodes_up");
    const html = renderNodeTiles(view);
    expect(html.match(/class="tile up"/g)).toHaveLength(4);
    expect(html).not.toContain(`class="tile down"`);
    const tips = new Set(view.nodes.map((n) => n.tip_hash));
    expect(tips.size).toBe(1);
    for (const node of view.nodes) {
      expect(html).toContain(node.node_id);
      expect(html).toContain(`height ${node.height}`);
    }
    expect(html).toContain("commits continue");
    expectNoFabricatedRefs(html, view);
  });

  it("a crashed node renders one red tile while commits continue", () => {
    const view = recordedData<NodesView>("admin_nodes_crashed");
    const html = renderNodeTiles(view);
    const crashed = view.nodes.filter((n) => n.status !== "Up");
    expect(crashed.map((n) => n.node_id)).toEqual(["node-2"]);
    expect(html.match(/class="tile down"/g)).toHaveLength(1);
    expect(html.match(/class="tile up"/g)).toHaveLength(3);
    expect(html).toContain(`commits continue (3/4 up, quorum ${view.quorum})`);
    expectNoFabricatedRefs(html, view);
  });
});

describe("metrics panel", () => {
  const metrics = recordedData<Metrics>("admin_metrics");

  it("shows committed fraction, divergence, and conservation from the payload", () => {
    const html = renderMetricsPanel(metrics);
    expect(html).toContain(String(metrics.availability.committed_fraction));
    expect(html).toContain(`${metrics.divergence.mismatches} mismatches`);
    expect(html).toContain(metrics.money.conserved ? "yes" : "NO");
    expect(html).toContain(String(metrics.availability.chain_height));
  });
});

describe("flights and detail views", () => {
  it("lists every flight with its live seat count", () => {
    const data = recordedData<{ flights: Flight[] }>("flights");
    const html = renderFlightsTable(data.flights);
    for (const flight of data.flights) {
      expect(html).toContain(flight.flight);
      expect(html).toContain(`${flight.free} of ${flight.capacity} free`);
    }
  });

  it("search results render only the filtered route", () => {
    const data = recordedData<{ flights: Flight[] }>("flights_search");
    expect(data.flights.map((f) => f.route)).toEqual(["DAC-CGP"]);
    expect(renderFlightsTable(data.flights)).toContain("DAC-CGP");
  });

  it("booking detail mirrors payment and refund figures", () => {
    const detail = recordedData<BookingDetail>("booking_detail");
    const html = renderBookingDetail(detail);
    expect(html).toContain(detail.pnr);
    expect(html).toContain(`paid ${detail.paid}`);
    expect(html).toContain(`refunded ${detail.refunded}`);
  });

  it("notifications render the stored receipt messages", () => {
    const receipts = recordedData<{ receipts: Receipt[] }>("notifications").receipts;
    const html = renderNotifications(receipts);
    for (const receipt of receipts) {
      if (receipt.message) {
        expect(html).toContain(receipt.message);
      }
    }
  });
});
