/** Typed client for the /v1 gateway JSON API. */

export interface GatewayConfig {
  baseUrl: string;
  token: string;
}

export interface TxRef {
  kind: string;
  tx_id: string;
  height: number;
}

export interface Flight {
  flight: string;
  route: string;
  departure_time: number;
  fare: number;
  capacity: number;
  sold: number;
  free: number;
}

export interface BookingResult {
  pnr: string;
  status: string;
  seat?: string;
  fare?: number;
  refund_amount?: number;
  retryable?: boolean;
  tx_refs: TxRef[];
}

export interface BookingDetail {
  pnr: string;
  customer: string;
  flight: string;
  status: string;
  seat: string | null;
  fare: number;
  paid: number;
  refunded: number;
  captured: boolean;
  departure_time: number;
}

export interface HistoryEvent {
  kind: string;
  height: number;
  block_hash: string;
  tx_id: string;
  payload: Record<string, unknown>;
}

export interface History {
  pnr: string;
  events: HistoryEvent[];
}

export interface Verdict {
  valid: boolean;
  height: number;
  reason: string;
  detail: string;
  tip_hash: string;
}

export interface NodeInfo {
  node_id: string;
  status: string;
  height: number;
  tip_hash: string;
  up_ticks: number;
}

export interface NodesView {
  nodes: NodeInfo[];
  quorum: number;
  clock: number;
  designated_leader: string;
}

export interface Metrics {
  availability: {
    submitted_txs: number;
    committed_txs: number;
    committed_fraction: number;
    stall_ticks: number;
    total_ticks: number;
    chain_height: number;
    per_node_uptime: Record<string, number>;
    up_nodes: number;
  };
  money: { captured_total: number; refunded_total: number; conserved: boolean };
  divergence: { mismatches: number; affected_pnrs: number };
  bookings: Record<string, number>;
  pending: number;
  notifications: number;
  safety_violations: number;
}

export interface Receipt {
  channel: string;
  pnr?: string;
  message?: string;
  detail?: string;
  parties?: string[];
  event?: string;
}

/** A gateway error envelope or transport failure, preserved verbatim. */
export class GatewayError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "GatewayError";
    this.code = code;
    this.status = status;
  }
}

export interface JsonResponse {
  status: number;
  json(): Promise<unknown>;
}

export type JsonFetch = (
  url: string,
  init: { method: string; headers: Record<string, string>; body?: string },
) => Promise<JsonResponse>;

interface Envelope {
  ok: boolean;
  data?: unknown;
  error?: { code: string; message: string };
}

function isEnvelope(body: unknown): body is Envelope {
  return typeof body === "object" && body !== null && typeof (body as Envelope).ok === "boolean";
}

/** Returns the envelope's data or throws the error it carries. */
export function unwrap(status: number, body: unknown): unknown {
  if (!isEnvelope(body)) {
    throw new GatewayError("BAD_RESPONSE", "response is not a gateway envelope", status);
  }
  if (!body.ok) {
    const err = body.error ?? { code: "BAD_RESPONSE", message: "error envelope without error body" };
    throw new GatewayError(err.code, err.message, status);
  }
  return body.data;
}

export class GatewayClient {
  private readonly config: GatewayConfig;
  private readonly fetchFn: JsonFetch;

  constructor(config: GatewayConfig, fetchFn: JsonFetch) {
    this.config = config;
    this.fetchFn = fetchFn;
  }

  private async call(method: string, path: string, body?: unknown): Promise<unknown> {
    const headers: Record<string, string> = {};
    if (this.config.token) {
      headers["Authorization"] = `Bearer ${this.config.token}`;
    }
    const init: { method: string; headers: Record<string, string>; body?: string } = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    let response: JsonResponse;
    let parsed: unknown;
    try {
      response = await this.fetchFn(this.config.baseUrl + path, init);
      parsed = await response.json();
    } catch (cause) {
      throw new GatewayError("UNREACHABLE", `gateway unreachable: ${String(cause)}`, 0);
    }
    return unwrap(response.status, parsed);
  }

  async listFlights(filter?: { route?: string; departure_time?: number }): Promise<Flight[]> {
    const params = new URLSearchParams();
    if (filter?.route) params.set("route", filter.route);
    if (filter?.departure_time !== undefined) params.set("departure_time", String(filter.departure_time));
    const query = params.toString();
    const data = (await this.call("GET", `/v1/flights${query ? `?${query}` : ""}`)) as { flights: Flight[] };
    return data.flights;
  }

  createBooking(req: { customer: string; flight: string; payment_method: string }): Promise<BookingResult> {
    return this.call("POST", "/v1/bookings", req) as Promise<BookingResult>;
  }

  retryPayment(pnr: string): Promise<BookingResult> {
    return this.call("POST", "/v1/payments", { pnr }) as Promise<BookingResult>;
  }

  getBooking(pnr: string): Promise<BookingDetail> {
    return this.call("GET", `/v1/bookings/${encodeURIComponent(pnr)}`) as Promise<BookingDetail>;
  }

  getHistory(pnr: string): Promise<History> {
    return this.call("GET", `/v1/bookings/${encodeURIComponent(pnr)}/history`) as Promise<History>;
  }

  cancelBooking(pnr: string, reason: string): Promise<BookingResult> {
    return this.call("POST", `/v1/bookings/${encodeURIComponent(pnr)}/cancel`, { reason }) as Promise<BookingResult>;
  }

  submitReview(req: { pnr: string; rating: number; text: string }): Promise<{ review_id: string }> {
    return this.call("POST", "/v1/reviews", req) as Promise<{ review_id: string }>;
  }

  async getNotifications(pnr: string): Promise<Receipt[]> {
    const data = (await this.call("GET", `/v1/notifications?pnr=${encodeURIComponent(pnr)}`)) as {
      receipts: Receipt[];
    };
    return data.receipts;
  }

  verifyChain(): Promise<Verdict> {
    return this.call("GET", "/v1/chain/verify") as Promise<Verdict>;
  }

  adminNodes(): Promise<NodesView> {
    return this.call("GET", "/v1/admin/nodes") as Promise<NodesView>;
  }

  adminMetrics(): Promise<Metrics> {
    return this.call("GET", "/v1/admin/metrics") as Promise<Metrics>;
  }
}
