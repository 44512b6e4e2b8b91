/**
 * Typed client for the block-shading session service.
 *
 * Every piece of geometry the UI paints comes from these endpoints;
 * nothing is recomputed client-side. The transport is injectable so
 * tests can run against a scripted fake.
 */

export interface Diagnostic {
  line: number;
  col: number;
  code: string;
  message: string;
}

export interface BlockNodeDto {
  id: number;
  kind: string;
  open: [number, number];
  close: [number, number];
  firstLine: number;
  lastLine: number;
  depth: number;
  parent: number | null;
  token: string | null;
  children: number[];
}

export interface TreeDto {
  lineCount: number;
  maxDepth: number;
  blocks: BlockNodeDto[];
}

export interface SnapshotDto {
  version: number;
  digest: string;
  tree: TreeDto;
  diagnostics: Diagnostic[];
}

export interface SessionDto extends SnapshotDto {
  session_id: string;
  text: string;
  grammar: string;
}

/** Editor rectangle in character-grid coordinates (columns are 0-based,
 * lines 1-based, rightCol exclusive). */
export interface RectDto {
  blockId: number;
  topLine: number;
  bottomLine: number;
  leftCol: number;
  rightCol: number;
  depth: number;
  fill: string;
  outline: string;
  active: boolean;
}

export interface ActivityErrorDto {
  blockId: number;
  line: number;
  code: string;
  message: string;
}

export interface RectsDto {
  version: number;
  rects: RectDto[];
  activityErrors?: ActivityErrorDto[];
}

/** Minimap rectangle: already-scaled pixel geometry. */
export interface OverviewRectDto {
  blockId: number;
  depth: number;
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  outline: string;
  active: boolean;
}

export interface OverviewDto {
  version: number;
  scale: number;
  width: number;
  height: number;
  from: number;
  to: number;
  granularity: number;
  rects: OverviewRectDto[];
  errorLines: number[];
  errorColor: string;
}

export interface ExtractDto extends SnapshotDto {
  text: string;
  new_method_lines: [number, number];
  call_line: number;
}

export interface EditRequest {
  start_byte: number;
  end_byte: number;
  replacement: string;
  base_version: number;
}

export interface SessionEvent {
  version: number;
  digest: string;
}

// Structural subset of fetch/Response so a fake transport needs no
// real Response objects.
export interface BodyReader {
  read(): Promise<{ done: boolean; value?: Uint8Array }>;
  cancel?(): Promise<void> | void;
}

export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  body?: { getReader(): BodyReader } | null;
}

export interface RequestInitLike {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
  signal?: AbortSignal;
}

export type Fetchlike = (url: string, init?: RequestInitLike) => Promise<ResponseLike>;

/** Error body shape shared by every failing endpoint. */
export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

async function failureFrom(res: ResponseLike): Promise<ApiRequestError> {
  let code = "E_UNKNOWN";
  let message = `request failed with status ${res.status}`;
  try {
    const body = (await res.json()) as { code?: string; message?: string };
    if (body && typeof body.code === "string") code = body.code;
    if (body && typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON failure body; keep the generic message
  }
  return new ApiRequestError(res.status, code, message);
}

/** Splits a byte stream into decoded text lines (newline-delimited JSON
 * arrives in arbitrary chunk boundaries, including mid-character). */
export class LineDecoder {
  private decoder = new TextDecoder("utf-8");
  private tail = "";

  push(chunk: Uint8Array): string[] {
    this.tail += this.decoder.decode(chunk, { stream: true });
    const parts = this.tail.split("\n");
    this.tail = parts.pop() ?? "";
    return parts.filter((line) => line.length > 0);
  }
}

export interface OverviewQuery {
  w: number;
  h: number;
  g: number;
  from?: number;
  to?: number;
  errors?: number[];
  defines?: string[];
}

export class BricsClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: Fetchlike = (url, init) =>
      fetch(url, init as RequestInit) as unknown as Promise<ResponseLike>,
  ) {}

  private async request(path: string, init?: RequestInitLike): Promise<unknown> {
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) throw await failureFrom(res);
    return res.json();
  }

  private post(path: string, body: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createSession(text: string, grammar: string): Promise<SessionDto> {
    return (await this.post("/sessions", { text, grammar })) as SessionDto;
  }

  async getSession(id: string): Promise<SessionDto> {
    return (await this.request(`/sessions/${id}`)) as SessionDto;
  }

  async applyEdit(id: string, edit: EditRequest): Promise<SnapshotDto> {
    return (await this.post(`/sessions/${id}/edits`, edit)) as SnapshotDto;
  }

  async getRects(id: string, defines?: string[]): Promise<RectsDto> {
    const query = defines ? `?defines=${encodeURIComponent(defines.join(","))}` : "";
    return (await this.request(`/sessions/${id}/rects${query}`)) as RectsDto;
  }

  async getOverview(id: string, q: OverviewQuery): Promise<OverviewDto> {
    const params = new URLSearchParams({
      w: String(q.w),
      h: String(q.h),
      g: String(q.g),
    });
    if (q.from !== undefined) params.set("from", String(q.from));
    if (q.to !== undefined) params.set("to", String(q.to));
    if (q.errors && q.errors.length) params.set("errors", q.errors.join(","));
    if (q.defines && q.defines.length) params.set("defines", q.defines.join(","));
    return (await this.request(`/sessions/${id}/overview?${params}`)) as OverviewDto;
  }

  async extract(id: string, blockId: number, name: string): Promise<ExtractDto> {
    return (await this.post(`/sessions/${id}/refactor/extract`, {
      block_id: blockId,
      name,
    })) as ExtractDto;
  }

  renderSvgUrl(id: string, fold?: number): string {
    const query = fold === undefined ? "" : `?fold=${fold}`;
    return `${this.base}/sessions/${id}/render.svg${query}`;
  }

  /**
   * Long-lived event subscription; invokes onEvent for each pushed
   * {version, digest} line until the stream ends or signal aborts.
   */
  async openEvents(
    id: string,
    onEvent: (event: SessionEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const res = await this.fetchFn(`${this.base}/sessions/${id}/events`, { signal });
    if (!res.ok) throw await failureFrom(res);
    if (!res.body) throw new ApiRequestError(0, "E_NO_STREAM", "response has no body");
    const reader = res.body.getReader();
    const lines = new LineDecoder();
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) return;
        if (!value) continue;
        for (const line of lines.push(value)) {
          onEvent(JSON.parse(line) as SessionEvent);
        }
      }
    } finally {
      await reader.cancel?.();
    }
  }
}
