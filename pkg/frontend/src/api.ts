/**
 * Typed client for the stepping service.
 *
 * All calls go through plain fetch; errors carry the HTTP status and the
 * decoded payload so the UI can distinguish diagnostics (422), busy
 * sessions (409) and vanished sessions (404) from network trouble.
 */

export interface TraceEntry {
  rendered: string
  justification: string
  depth: number
  span: [number, number]
}

export type SessionStatus = 'running' | 'done' | 'failed' | 'fuel-exhausted'

export interface Diagnostic {
  kind: 'syntax' | 'type'
  message: string
  line: number | null
  column: number | null
}

export interface CreateResult {
  id: string
  entry: TraceEntry
  warnings: string[]
}

export interface StepResult {
  entries: TraceEntry[]
  status: SessionStatus
}

export interface SessionOptions {
  fuel?: number
  dots?: number
  force?: boolean
  max_entries?: number
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: unknown,
    message?: string,
  ) {
    super(message ?? `service responded with ${status}`)
  }

  get diagnostic(): Diagnostic | null {
    if (this.status !== 422) return null
    return this.payload as Diagnostic
  }
}

export interface ServiceClient {
  createSession(program: string, expr: string, options?: SessionOptions): Promise<CreateResult>
  stepSession(id: string, n: number): Promise<StepResult>
  forceSession(id: string): Promise<{ status: SessionStatus }>
  getTrace(id: string): Promise<StepResult>
  deleteSession(id: string): Promise<void>
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, {
    headers: { 'content-type': 'application/json' },
    ...init,
  })
  if (response.status === 204) return undefined as T
  const payload = await response.json().catch(() => null)
  if (!response.ok) {
    throw new ApiError(response.status, payload)
  }
  return payload as T
}

export function makeClient(base = ''): ServiceClient {
  return {
    createSession(program, expr, options) {
      const body: Record<string, unknown> = { program, expr }
      if (options) body.options = options
      return request<CreateResult>(base, '/sessions', {
        method: 'POST',
        body: JSON.stringify(body),
      })
    },
    stepSession(id, n) {
      return request<StepResult>(base, `/sessions/${id}/step`, {
        method: 'POST',
        body: JSON.stringify({ n }),
      })
    },
    forceSession(id) {
      return request(base, `/sessions/${id}/force`, { method: 'POST' })
    },
    getTrace(id) {
      return request<StepResult>(base, `/sessions/${id}/trace`)
    },
    deleteSession(id) {
      return request<void>(base, `/sessions/${id}`, { method: 'DELETE' })
    },
  }
}
