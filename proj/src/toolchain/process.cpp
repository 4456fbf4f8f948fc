/*
 * Copyright 2026 The natsyn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <natsyn/toolchain.hpp>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

namespace natsyn::toolchain
{

namespace
{

std::string first_line( std::string const& text )
{
  auto const end = text.find( '\n' );
  return end == std::string::npos ? text : text.substr( 0, end );
}

bool is_executable( std::filesystem::path const& p )
{
  std::error_code ec;
  return std::filesystem::is_regular_file( p, ec ) && ::access( p.c_str(), X_OK ) == 0;
}

std::optional<std::filesystem::path> search_path( std::string const& name )
{
  if ( name.find( '/' ) != std::string::npos )
    return is_executable( name ) ? std::optional<std::filesystem::path>( name ) : std::nullopt;
  char const* path = std::getenv( "PATH" );
  if ( path == nullptr )
    return std::nullopt;
  std::stringstream dirs( path );
  std::string dir;
  while ( std::getline( dirs, dir, ':' ) )
  {
    auto const candidate = std::filesystem::path( dir.empty() ? "." : dir ) / name;
    if ( is_executable( candidate ) )
      return candidate;
  }
  return std::nullopt;
}

struct Fd
{
  int fd = -1;
  ~Fd() { close(); }
  void close()
  {
    if ( fd >= 0 )
      ::close( fd );
    fd = -1;
  }
};

void make_pipe( Fd& read_end, Fd& write_end )
{
  int fds[2];
  if ( ::pipe2( fds, O_CLOEXEC ) != 0 )
    throw std::system_error( errno, std::generic_category(), "pipe" );
  read_end.fd = fds[0];
  write_end.fd = fds[1];
}

} // namespace

ToolMissing::ToolMissing( std::string exe )
    : std::runtime_error( "required tool '" + exe + "' was not found or is not executable" ), executable( std::move( exe ) )
{
}

ToolFailed::ToolFailed( ToolReport r )
    : std::runtime_error( r.tool + " failed (exit " + std::to_string( r.exit_status ) + "): " +
                          first_line( r.err.empty() ? r.out : r.err ) ),
      report( std::move( r ) )
{
}

ToolTimeout::ToolTimeout( ToolReport r )
    : std::runtime_error( r.tool + " exceeded its time limit after " + std::to_string( r.wall_seconds ) + " s" ),
      report( std::move( r ) )
{
}

std::optional<std::filesystem::path> find_tool( std::optional<std::filesystem::path> const& configured,
                                                std::vector<std::string> const& names )
{
  if ( configured && is_executable( *configured ) )
    return configured;
  for ( auto const& name : names )
  {
    if ( auto found = search_path( name ) )
      return found;
  }
  return std::nullopt;
}

ToolReport run_process( std::vector<std::string> const& argv, std::string const& stdin_text, ToolLimits const& limits,
                        std::filesystem::path const& cwd )
{
  if ( argv.empty() )
    throw std::invalid_argument( "run_process: empty argument vector" );
  if ( limits.wall_timeout.count() <= 0 )
    throw std::invalid_argument( "run_process: timeout must be positive" );
  static std::once_flag ignore_sigpipe;
  std::call_once( ignore_sigpipe, [] { ::signal( SIGPIPE, SIG_IGN ); } );

  auto const exe = search_path( argv[0] );
  if ( !exe )
    throw ToolMissing( argv[0] );

  ToolReport report;
  report.tool = std::filesystem::path( argv[0] ).filename().string();
  report.argv = argv;

  Fd in_r, in_w, out_r, out_w, err_r, err_w, exec_r, exec_w;
  make_pipe( in_r, in_w );
  make_pipe( out_r, out_w );
  make_pipe( err_r, err_w );
  make_pipe( exec_r, exec_w );

  std::vector<char*> args;
  for ( auto const& a : argv )
    args.push_back( const_cast<char*>( a.c_str() ) );
  args.push_back( nullptr );
  std::string const exe_path = exe->string();
  std::string const dir = cwd.string();

  auto const started = std::chrono::steady_clock::now();
  pid_t const pid = ::fork();
  if ( pid < 0 )
    throw std::system_error( errno, std::generic_category(), "fork" );
  if ( pid == 0 )
  {
    // Child: only async-signal-safe calls from here on.
    ::setpgid( 0, 0 );
    struct rlimit cap;
    cap.rlim_cur = cap.rlim_max = static_cast<rlim_t>( limits.memory_cap );
    ::setrlimit( RLIMIT_AS, &cap );
    int err = 0;
    if ( !dir.empty() && ::chdir( dir.c_str() ) != 0 )
      err = errno;
    if ( err == 0 && ( ::dup2( in_r.fd, 0 ) < 0 || ::dup2( out_w.fd, 1 ) < 0 || ::dup2( err_w.fd, 2 ) < 0 ) )
      err = errno;
    if ( err == 0 )
    {
      ::execv( exe_path.c_str(), args.data() );
      err = errno;
    }
    [[maybe_unused]] auto const n = ::write( exec_w.fd, &err, sizeof err );
    ::_exit( 127 );
  }
  ::setpgid( pid, pid );
  in_r.close();
  out_w.close();
  err_w.close();
  exec_w.close();

  int exec_errno = 0;
  ssize_t const got = ::read( exec_r.fd, &exec_errno, sizeof exec_errno );
  if ( got == static_cast<ssize_t>( sizeof exec_errno ) )
  {
    ::waitpid( pid, nullptr, 0 );
    if ( exec_errno == ENOENT || exec_errno == EACCES || exec_errno == ENOEXEC )
      throw ToolMissing( argv[0] );
    throw std::system_error( exec_errno, std::generic_category(), "starting " + argv[0] );
  }

  ::fcntl( in_w.fd, F_SETFL, ::fcntl( in_w.fd, F_GETFL ) | O_NONBLOCK );
  std::size_t written = 0;
  if ( stdin_text.empty() )
    in_w.close();

  auto const deadline = started + std::chrono::duration_cast<std::chrono::steady_clock::duration>( limits.wall_timeout );
  bool killed = false;
  std::chrono::steady_clock::time_point drain_until{};
  char buffer[65536];
  while ( out_r.fd >= 0 || err_r.fd >= 0 )
  {
    auto const now = std::chrono::steady_clock::now();
    if ( !killed && now >= deadline )
    {
      ::kill( -pid, SIGKILL );
      killed = true;
      report.timed_out = true;
      in_w.close();
      drain_until = now + std::chrono::seconds( 1 );
    }
    if ( killed && now >= drain_until )
      break;
    auto const wait_until = killed ? drain_until : deadline;
    auto const wait_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>( wait_until - now ).count() + 1;

    pollfd fds[3];
    int n = 0;
    int out_slot = -1, err_slot = -1, in_slot = -1;
    if ( out_r.fd >= 0 )
    {
      out_slot = n;
      fds[n++] = { out_r.fd, POLLIN, 0 };
    }
    if ( err_r.fd >= 0 )
    {
      err_slot = n;
      fds[n++] = { err_r.fd, POLLIN, 0 };
    }
    if ( in_w.fd >= 0 )
    {
      in_slot = n;
      fds[n++] = { in_w.fd, POLLOUT, 0 };
    }
    int const ready = ::poll( fds, static_cast<nfds_t>( n ), static_cast<int>( std::min<long long>( wait_ms, 1000 ) ) );
    if ( ready < 0 )
    {
      if ( errno == EINTR )
        continue;
      throw std::system_error( errno, std::generic_category(), "poll" );
    }
    auto drain = [&]( int slot, Fd& fd, std::string& sink ) {
      if ( slot < 0 || fds[slot].revents == 0 )
        return;
      ssize_t const r = ::read( fd.fd, buffer, sizeof buffer );
      if ( r > 0 )
        sink.append( buffer, static_cast<std::size_t>( r ) );
      else if ( r == 0 || ( errno != EINTR && errno != EAGAIN ) )
        fd.close();
    };
    drain( out_slot, out_r, report.out );
    drain( err_slot, err_r, report.err );
    if ( in_slot >= 0 && fds[in_slot].revents != 0 )
    {
      ssize_t const w = ::write( in_w.fd, stdin_text.data() + written, stdin_text.size() - written );
      if ( w > 0 )
        written += static_cast<std::size_t>( w );
      if ( ( w < 0 && errno != EAGAIN && errno != EINTR ) || written == stdin_text.size() )
        in_w.close();
    }
  }

  // Wait for the leader without reaping it, so the group id stays reserved
  // while stray descendants are killed.
  siginfo_t info{};
  while ( !report.timed_out )
  {
    info.si_pid = 0;
    if ( ::waitid( P_PID, static_cast<id_t>( pid ), &info, WEXITED | WNOHANG | WNOWAIT ) == 0 && info.si_pid == pid )
      break;
    if ( std::chrono::steady_clock::now() >= deadline )
    {
      report.timed_out = true;
      break;
    }
    ::usleep( 1000 );
  }
  ::kill( -pid, SIGKILL );
  int status = 0;
  ::waitpid( pid, &status, 0 );
  report.wall_seconds = std::chrono::duration<double>( std::chrono::steady_clock::now() - started ).count();
  if ( WIFEXITED( status ) )
    report.exit_status = WEXITSTATUS( status );
  else if ( WIFSIGNALED( status ) )
    report.signal = WTERMSIG( status );
  return report;
}

} // namespace natsyn::toolchain
